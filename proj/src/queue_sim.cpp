#include "qsadapt/queue_sim.hpp"

#include <cmath>
#include <limits>

#include "qsadapt/errors.hpp"

namespace qsa::queue {

std::string_view to_string(OverflowPolicy p) {
  return p == OverflowPolicy::RejectArrival ? "RejectArrival" : "EvictLowestSeverity";
}

std::optional<OverflowPolicy> parse_overflow_policy(std::string_view s) {
  if (s == "RejectArrival") return OverflowPolicy::RejectArrival;
  if (s == "EvictLowestSeverity") return OverflowPolicy::EvictLowestSeverity;
  return std::nullopt;
}

void validate(const QueueConfig& c) {
  require(std::isfinite(c.lambda) && c.lambda >= 0, "lambda must be non-negative");
  validate(c.rates);
  require(c.capacity_k >= 1, "capacity K must be at least 1");
}

PriorityServer::PriorityServer(QueueConfig config, std::uint64_t service_seed)
    : config_(config), rng_(service_seed) {
  validate(config_);
}

void PriorityServer::advance(double t) {
  require(t >= now_, "queue clock cannot run backwards");
  const double dt = t - now_;
  queue_area_ += dt * static_cast<double>(waiting_.size());
  system_area_ += dt * static_cast<double>(in_system());
  now_ = t;
}

void PriorityServer::reset_areas() {
  queue_area_ = 0.0;
  system_area_ = 0.0;
  area_origin_ = now_;
}

double PriorityServer::draw_service() {
  const auto& r = config_.rates;
  return rng_.exponential(r.mu1) + rng_.exponential(r.mu2) + rng_.exponential(r.mu3);
}

void PriorityServer::start_next() {
  if (waiting_.empty()) return;
  AnomalyEvent next = waiting_.extract_max();
  if (start_hook_) start_hook_(next, waiting_);
  const double s = draw_service();
  in_service_ = InService{std::move(next), now_, now_ + s};
}

Admission PriorityServer::arrive(AnomalyEvent event, AnomalyEvent* evicted) {
  advance(event.arrival_time);
  Admission result = Admission::Admitted;
  if (in_system() >= config_.capacity_k) {
    if (config_.overflow_policy == OverflowPolicy::EvictLowestSeverity && !waiting_.empty() &&
        outranks(event, waiting_.peek_lowest())) {
      AnomalyEvent gone = waiting_.remove_lowest();
      if (evicted) *evicted = std::move(gone);
      result = Admission::AdmittedWithEviction;
    } else {
      return Admission::Rejected;
    }
  }
  waiting_.insert(std::move(event));
  if (!busy()) start_next();
  return result;
}

std::optional<double> PriorityServer::next_departure() const {
  if (!in_service_) return std::nullopt;
  return in_service_->end;
}

Departure PriorityServer::depart() {
  if (!in_service_) fail(ErrorCode::EmptyQueue, "server is idle");
  advance(in_service_->end);
  Departure d{std::move(in_service_->event), in_service_->start, in_service_->end};
  in_service_.reset();
  start_next();
  return d;
}

namespace {

// Pulls the next arrival from either a Poisson generator or a fixed trace.
class ArrivalSource {
 public:
  ArrivalSource(const QueueConfig& config, const SimOptions& options)
      : rng_(options.seed), lambda_(config.lambda), mix_(options.mix) {
    if (lambda_ > 0) generate();
  }
  explicit ArrivalSource(const std::vector<AnomalyEvent>& trace) : rng_(0), trace_(&trace) {
    if (!trace.empty()) next_ = trace.front();
  }

  const std::optional<AnomalyEvent>& peek() const { return next_; }

  AnomalyEvent pop() {
    AnomalyEvent e = std::move(*next_);
    next_.reset();
    if (trace_) {
      if (++index_ < trace_->size()) next_ = (*trace_)[index_];
    } else {
      generate();
    }
    return e;
  }

 private:
  void generate() {
    clock_ += rng_.exponential(lambda_);
    AnomalyEvent e;
    e.id = ++generated_;
    e.arrival_time = clock_;
    e.category = kAllCategories[static_cast<std::size_t>(rng_.uniform_int(0, 3))];
    e.severity = rng_.uniform(mix_.min_ms, mix_.max_ms);
    e.trigger = {"synthetic", e.severity};
    next_ = std::move(e);
  }

  Rng rng_;
  double lambda_ = 0.0;
  SeverityMix mix_;
  const std::vector<AnomalyEvent>* trace_ = nullptr;
  std::size_t index_ = 0;
  double clock_ = 0.0;
  std::uint64_t generated_ = 0;
  std::optional<AnomalyEvent> next_;
};

std::uint64_t derive_service_seed(std::uint64_t seed) {
  return seed * 0x9E3779B97F4A7C15ULL + 0x632BE59BD9B4E019ULL;
}

SimStats run(const QueueConfig& config, ArrivalSource& source, const SimOptions& opt,
             std::vector<Departure>* departures) {
  validate(config);
  require(std::isfinite(opt.horizon) && opt.horizon > 0, "horizon must be positive");
  require(opt.warmup >= 0 && opt.warmup < opt.horizon, "warmup must lie in [0, horizon)");
  require(opt.mix.min_ms >= 0 && opt.mix.max_ms >= opt.mix.min_ms, "invalid severity mix");
  if (opt.r_at) require(*opt.r_at >= 0, "Rat must be non-negative");

  PriorityServer server(config, derive_service_seed(opt.seed));
  SimStats st;
  bool warm = opt.warmup == 0.0;

  // Post-warmup accumulators.
  std::uint64_t offered = 0, admitted = 0, refused = 0;
  std::uint64_t waits_n = 0, services_n = 0;
  double waits_sum = 0.0, services_sum = 0.0;

  auto warm_up_to = [&](double t) {
    if (!warm && t >= opt.warmup) {
      server.advance(opt.warmup);
      server.reset_areas();
      warm = true;
    }
  };

  server.on_service_start([&](const AnomalyEvent& e, const SeverityHeap&) {
    if (warm && e.arrival_time >= opt.warmup) {
      waits_sum += server.now() - e.arrival_time;
      ++waits_n;
    }
  });

  constexpr double inf = std::numeric_limits<double>::infinity();
  for (;;) {
    const double ta = source.peek() ? source.peek()->arrival_time : inf;
    const double td = server.next_departure().value_or(inf);
    const double t = std::min(ta, td);
    if (t > opt.horizon) break;
    warm_up_to(t);
    if (td <= ta) {
      Departure d = server.depart();
      ++st.processed_total;
      if (d.event.severity > opt.severe_threshold_ms) ++st.processed_severe;
      if (d.service_start >= opt.warmup) {
        services_sum += d.service();
        ++services_n;
      }
      if (departures) departures->push_back(std::move(d));
    } else {
      AnomalyEvent e = source.pop();
      const bool counted = e.arrival_time >= opt.warmup;
      ++st.arrivals;
      if (counted) ++offered;
      AnomalyEvent evicted;
      switch (server.arrive(std::move(e), &evicted)) {
        case Admission::Admitted:
          if (counted) ++admitted;
          break;
        case Admission::AdmittedWithEviction:
          ++st.rejected;
          if (counted) {
            ++admitted;
            ++refused;
          }
          // Time spent queued before eviction still counts as waiting.
          if (warm && evicted.arrival_time >= opt.warmup) {
            waits_sum += server.now() - evicted.arrival_time;
            ++waits_n;
          }
          break;
        case Admission::Rejected:
          ++st.rejected;
          if (counted) ++refused;
          break;
      }
    }
  }
  warm_up_to(opt.horizon);
  server.advance(opt.horizon);

  const double span = opt.horizon - opt.warmup;
  st.in_system_at_horizon = server.in_system();
  st.mean_lq = server.queue_area() / span;
  st.mean_l = server.system_area() / span;
  st.mean_wq = waits_n ? waits_sum / static_cast<double>(waits_n) : 0.0;
  st.mean_x_bar_empirical = services_n ? services_sum / static_cast<double>(services_n) : 0.0;
  st.effective_lambda = static_cast<double>(admitted) / span;
  st.blocking_prob = offered ? static_cast<double>(refused) / static_cast<double>(offered) : 0.0;
  st.wq_from_queue_length = offered ? wq_from_lq(st.mean_lq, static_cast<double>(offered) / span) : 0.0;
  st.mean_rtq = response_time_in_queue(st.mean_wq, st.mean_x_bar_empirical);
  st.mean_rs = system_response(st.mean_rtq, opt.r_at.value_or(0.0));
  return st;
}

}  // namespace

SimStats simulate(const QueueConfig& config, const SimOptions& options,
                  std::vector<Departure>* departures) {
  ArrivalSource source(config, options);
  return run(config, source, options, departures);
}

SimStats simulate(const QueueConfig& config, const std::vector<AnomalyEvent>& events,
                  const SimOptions& options, std::vector<Departure>* departures) {
  for (std::size_t i = 1; i < events.size(); ++i) {
    require(events[i].arrival_time >= events[i - 1].arrival_time,
            "trace events must be sorted by arrival time");
  }
  ArrivalSource source(events);
  return run(config, source, options, departures);
}

}  // namespace qsa::queue
