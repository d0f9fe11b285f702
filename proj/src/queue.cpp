#include "qqcm/queue.hpp"

#include <algorithm>
#include <ostream>

#include "qqcm/csv.hpp"
#include "qqcm/errors.hpp"

namespace qqcm {

LindleyStep lindley_step(double w_prev, double s_prev, double t_prev) {
  if (!(w_prev >= 0.0) || !(s_prev >= 0.0) || !(t_prev >= 0.0)) {
    throw ArgumentError("lindley_step: times must be >= 0");
  }
  const double x = w_prev + s_prev - t_prev;
  return {std::max(0.0, x), std::max(0.0, -x)};
}

QueueTrace trace_from_times(std::vector<double> interarrival, std::vector<double> service) {
  if (interarrival.empty() || interarrival.size() != service.size()) {
    throw ArgumentError("trace_from_times: need equal, nonzero numbers of T and S");
  }
  const std::size_t n = service.size();
  QueueTrace q;
  q.interarrival = std::move(interarrival);
  q.service = std::move(service);
  q.waiting.resize(n);
  q.idle.resize(n);
  q.arrival.resize(n);
  q.departure.resize(n);

  q.waiting[0] = 0.0;
  q.idle[0] = 0.0;
  q.arrival[0] = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const auto step = lindley_step(q.waiting[k - 1], q.service[k - 1], q.interarrival[k - 1]);
    q.waiting[k] = step.waiting;
    q.idle[k] = step.idle;
    q.arrival[k] = q.arrival[k - 1] + q.interarrival[k - 1];
  }
  for (std::size_t k = 0; k < n; ++k) {
    q.departure[k] = q.arrival[k] + q.waiting[k] + q.service[k];
  }
  return q;
}

QueueTrace simulate_queue(const DistributionSpec& arrival, const DistributionSpec& service,
                          std::size_t n_ancillas, RngStream& stream) {
  if (n_ancillas == 0) {
    throw ArgumentError("simulate_queue: n_ancillas must be >= 1");
  }
  std::vector<double> t(n_ancillas), s(n_ancillas);
  for (std::size_t k = 0; k < n_ancillas; ++k) {
    t[k] = sample(arrival, stream);
    s[k] = sample(service, stream);
  }
  return trace_from_times(std::move(t), std::move(s));
}

double utilization(const DistributionSpec& arrival, const DistributionSpec& service) {
  const double mt = mean(arrival);
  if (!(mt > 0.0)) {
    throw ArgumentError("utilization: mean interarrival time must be > 0");
  }
  return mean(service) / mt;
}

std::vector<std::pair<double, int>> queue_length_trace(const QueueTrace& trace) {
  // Arrival and departure times are each nondecreasing; merge them.
  std::vector<std::pair<double, int>> events;
  events.reserve(2 * trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) {
    events.emplace_back(trace.arrival[k], +1);
    events.emplace_back(trace.departure[k], -1);
  }
  std::stable_sort(events.begin(), events.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  std::vector<std::pair<double, int>> steps;
  int population = 0;
  std::size_t i = 0;
  if (events.empty() || events.front().first > 0.0) {
    steps.emplace_back(0.0, 0);
  }
  while (i < events.size()) {
    const double time = events[i].first;
    while (i < events.size() && events[i].first == time) {
      population += events[i].second;
      ++i;
    }
    if (!steps.empty() && steps.back().second == population) {
      continue;
    }
    steps.emplace_back(time, population);
  }
  return steps;
}

int population_at(const std::vector<std::pair<double, int>>& steps, double t) {
  auto it = std::upper_bound(steps.begin(), steps.end(), t,
                             [](double value, const auto& step) { return value < step.first; });
  if (it == steps.begin()) {
    return 0;
  }
  return std::prev(it)->second;
}

void write_queue_csv(std::ostream& os, const QueueTrace& trace) {
  CsvWriter csv(os);
  csv.header({"n", "T", "S", "Wq", "I", "t_arrive", "t_depart"});
  for (std::size_t k = 0; k < trace.size(); ++k) {
    csv.row(k + 1, trace.interarrival[k], trace.service[k], trace.waiting[k], trace.idle[k],
            trace.arrival[k], trace.departure[k]);
  }
}

}  // namespace qqcm
