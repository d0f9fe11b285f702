#pragma once

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include "qqcm/distributions.hpp"

namespace qqcm {

/// Timing record of a single-server FIFO queue, one entry per ancilla.
///
/// Indices are zero-based in memory: entry k is ancilla n = k + 1.
/// interarrival[k] is the gap between ancilla k+1 and k+2, so the first
/// ancilla arrives at time zero and arrival[k] = sum_{j<k} interarrival[j].
struct QueueTrace {
  std::vector<double> interarrival;  // T
  std::vector<double> service;       // S
  std::vector<double> waiting;       // Wq, time spent queued before service
  std::vector<double> idle;          // I, server idle time right before this service
  std::vector<double> arrival;       // t
  std::vector<double> departure;     // s = t + Wq + S

  std::size_t size() const { return service.size(); }
};

struct LindleyStep {
  double waiting;
  double idle;
};

/// One step of Lindley's recursion: with x = w + s - t, returns
/// (max(0, x), max(0, -x)). Throws ArgumentError on negative inputs.
LindleyStep lindley_step(double w_prev, double s_prev, double t_prev);

/// Builds a trace from given interarrival and service times (equal lengths, >= 1).
QueueTrace trace_from_times(std::vector<double> interarrival, std::vector<double> service);

/// Simulates n_ancillas customers; per ancilla draws T then S from the stream.
QueueTrace simulate_queue(const DistributionSpec& arrival, const DistributionSpec& service,
                          std::size_t n_ancillas, RngStream& stream);

/// r = E[S] / E[T].
double utilization(const DistributionSpec& arrival, const DistributionSpec& service);

/// Number in system N(t) as a right-continuous step function.
/// Each breakpoint (time, count) gives the population on [time, next time).
/// The first breakpoint is (0, N(0)).
std::vector<std::pair<double, int>> queue_length_trace(const QueueTrace& trace);

/// Evaluates a step function from queue_length_trace at time t (0 before the first breakpoint).
int population_at(const std::vector<std::pair<double, int>>& steps, double t);

/// CSV with header n,T,S,Wq,I,t_arrive,t_depart.
void write_queue_csv(std::ostream& os, const QueueTrace& trace);

}  // namespace qqcm
