#include "qsadapt/severity_heap.hpp"

#include <utility>

#include "qsadapt/errors.hpp"

namespace qsa::queue {

void SeverityHeap::place(std::size_t i) { slot_[heap_[i].id] = i; }

void SeverityHeap::swap_slots(std::size_t i, std::size_t j) {
  std::swap(heap_[i], heap_[j]);
  place(i);
  place(j);
}

void SeverityHeap::sift_up(std::size_t i) {
  while (i > 0) {
    const std::size_t parent = (i - 1) / 2;
    if (!outranks(heap_[i], heap_[parent])) break;
    swap_slots(i, parent);
    i = parent;
  }
}

void SeverityHeap::sift_down(std::size_t i) {
  const std::size_t n = heap_.size();
  for (;;) {
    std::size_t best = i;
    const std::size_t l = 2 * i + 1;
    const std::size_t r = l + 1;
    if (l < n && outranks(heap_[l], heap_[best])) best = l;
    if (r < n && outranks(heap_[r], heap_[best])) best = r;
    if (best == i) return;
    swap_slots(i, best);
    i = best;
  }
}

void SeverityHeap::insert(AnomalyEvent event) {
  if (contains(event.id)) {
    fail(ErrorCode::InvalidArgument, "event id " + std::to_string(event.id) + " already queued");
  }
  heap_.push_back(std::move(event));
  place(heap_.size() - 1);
  sift_up(heap_.size() - 1);
}

AnomalyEvent SeverityHeap::take(std::size_t i) {
  const std::size_t last = heap_.size() - 1;
  if (i != last) swap_slots(i, last);
  AnomalyEvent out = std::move(heap_.back());
  heap_.pop_back();
  slot_.erase(out.id);
  if (i < heap_.size()) {
    // The former last leaf now sits at i and may violate order either way.
    if (i > 0 && outranks(heap_[i], heap_[(i - 1) / 2])) {
      sift_up(i);
    } else {
      sift_down(i);
    }
  }
  return out;
}

const AnomalyEvent& SeverityHeap::peek_max() const {
  if (heap_.empty()) fail(ErrorCode::EmptyQueue, "peek on empty anomaly queue");
  return heap_.front();
}

AnomalyEvent SeverityHeap::extract_max() {
  if (heap_.empty()) fail(ErrorCode::EmptyQueue, "extract from empty anomaly queue");
  return take(0);
}

AnomalyEvent SeverityHeap::remove(std::uint64_t id) {
  auto it = slot_.find(id);
  if (it == slot_.end()) fail(ErrorCode::NotFound, "event id " + std::to_string(id) + " not queued");
  return take(it->second);
}

std::size_t SeverityHeap::lowest_slot() const {
  // The minimum of a max-heap is always a leaf.
  std::size_t best = heap_.size() / 2;
  for (std::size_t i = best + 1; i < heap_.size(); ++i) {
    if (outranks(heap_[best], heap_[i])) best = i;
  }
  return best;
}

const AnomalyEvent& SeverityHeap::peek_lowest() const {
  if (heap_.empty()) fail(ErrorCode::EmptyQueue, "peek on empty anomaly queue");
  return heap_[lowest_slot()];
}

AnomalyEvent SeverityHeap::remove_lowest() {
  if (heap_.empty()) fail(ErrorCode::EmptyQueue, "remove from empty anomaly queue");
  return take(lowest_slot());
}

void SeverityHeap::clear() {
  heap_.clear();
  slot_.clear();
}

bool SeverityHeap::valid() const {
  if (slot_.size() != heap_.size()) return false;
  for (std::size_t i = 0; i < heap_.size(); ++i) {
    auto it = slot_.find(heap_[i].id);
    if (it == slot_.end() || it->second != i) return false;
    if (i > 0 && outranks(heap_[i], heap_[(i - 1) / 2])) return false;
  }
  return true;
}

}  // namespace qsa::queue
