#ifndef DAAS_SLAOPT_HPP
#define DAAS_SLAOPT_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace daas::slaopt {

struct Scenario {
  double probability = 0.0;
  double availability = 0.0;
};

/// Cost scenarios with their probabilities and conditional availabilities.
struct AvailabilityModel {
  std::vector<Scenario> scenarios;
};

/// Probability-weighted availability. Rejects models whose probabilities do not sum to 1.
double availability(const AvailabilityModel& model);

/**
 * One request class served by a pool of identical servers.
 * lambda: arrival rate, mu: per-server service rate, revenue: value of a
 * request answered within `deadline`.
 */
struct ServiceClass {
  double lambda = 1.0;
  double mu = 1.0;
  double revenue = 0.0;
  double deadline = 1.0;

  double utilization() const { return lambda / mu; }
};

struct AllocationProblem {
  std::vector<ServiceClass> classes;
  std::int64_t servers = 1;

  void validate() const;
};

using Counts = std::vector<std::int64_t>;

struct Allocation {
  Counts n;
  double objective = 0.0;
};

struct Infeasible {
  /// Per-class minimum stable counts.
  Counts minimum;
  std::int64_t required = 0;
  std::int64_t budget = 0;
};

using AllocationResult = std::variant<Allocation, Infeasible>;

/// P(response time <= deadline) for an M/M/1 queue of capacity n * mu: 1 - exp(-(n mu - lambda) R).
double deadline_meet_prob(const ServiceClass& c, std::int64_t n);

/// Expected revenue rate sum_i lambda_i b_i P_i(n_i); rejects infeasible counts.
double objective(const AllocationProblem& p, const Counts& n);

/// Gain from one more server: lambda b e^{-(n mu - lambda) R} (1 - e^{-mu R}).
double marginal_gain(const ServiceClass& c, std::int64_t n);

struct MinimumCounts {
  Counts n;
  std::int64_t required = 0;
  bool feasible = false;
};

/// Smallest n_i with n_i > lambda_i / mu_i, i.e. floor(rho_i) + 1.
MinimumCounts min_feasible(const AllocationProblem& p);

/// Exact greedy marginal allocation (each term is concave in n_i).
AllocationResult optimize_greedy(const AllocationProblem& p);

inline constexpr std::uint64_t kBruteForceLimit = 10'000'000;

/// Number of feasible compositions, saturating at kBruteForceLimit + 1.
std::uint64_t composition_count(const AllocationProblem& p);

/// Exhaustive search; ties resolve to the lexicographically smallest n.
AllocationResult optimize_bruteforce(const AllocationProblem& p);

// JSON wire format.
AllocationProblem problem_from_json(const nlohmann::json& j);
nlohmann::json problem_to_json(const AllocationProblem& p);
AvailabilityModel availability_from_json(const nlohmann::json& j);
nlohmann::json result_to_json(const AllocationResult& r);

} // namespace daas::slaopt

#endif
