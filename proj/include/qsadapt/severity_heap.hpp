#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "qsadapt/monitor.hpp"

namespace qsa::queue {

using monitor::AnomalyEvent;

/// Strict priority order: higher severity first, then earlier arrival, then
/// lower id. Returns true when `a` must leave the queue before `b`.
inline bool outranks(const AnomalyEvent& a, const AnomalyEvent& b) {
  if (a.severity != b.severity) return a.severity > b.severity;
  if (a.arrival_time != b.arrival_time) return a.arrival_time < b.arrival_time;
  return a.id < b.id;
}

/// Array-backed binary max-heap of anomaly events with O(log n) removal by id.
///
/// An id-to-slot index is kept in step with every swap so that `remove(id)`
/// can locate an arbitrary event, move the last leaf into its slot and
/// re-heapify in whichever direction the moved element needs.
///
/// The heap is a plain value type. It may be moved between threads and shared
/// by one producer and one consumer as long as the caller serialises access.
class SeverityHeap {
 public:
  /// Throws Error(InvalidArgument) if an event with the same id is queued.
  void insert(AnomalyEvent event);

  /// Throws Error(EmptyQueue) when empty.
  AnomalyEvent extract_max();
  const AnomalyEvent& peek_max() const;

  /// Throws Error(NotFound) if no queued event has this id.
  AnomalyEvent remove(std::uint64_t id);

  /// Removes the event every other queued event outranks. Throws on empty.
  AnomalyEvent remove_lowest();
  const AnomalyEvent& peek_lowest() const;

  bool contains(std::uint64_t id) const { return slot_.count(id) != 0; }
  std::size_t size() const { return heap_.size(); }
  bool empty() const { return heap_.empty(); }
  void clear();

  /// Heap order and index consistency, checked exhaustively. For tests.
  bool valid() const;

  const std::vector<AnomalyEvent>& raw() const { return heap_; }

 private:
  void place(std::size_t i);
  void swap_slots(std::size_t i, std::size_t j);
  void sift_up(std::size_t i);
  void sift_down(std::size_t i);
  AnomalyEvent take(std::size_t i);
  std::size_t lowest_slot() const;

  std::vector<AnomalyEvent> heap_;
  std::unordered_map<std::uint64_t, std::size_t> slot_;
};

}  // namespace qsa::queue
