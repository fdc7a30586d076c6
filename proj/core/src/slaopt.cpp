#include "daas/slaopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "daas/error.hpp"

namespace daas::slaopt {

namespace {

constexpr double kProbabilityTolerance = 1e-9;

void check_class(const ServiceClass& c, std::size_t index) {
  const std::string where = "service class " + std::to_string(index) + ": ";
  if (!(c.lambda > 0.0) || !std::isfinite(c.lambda)) {
    throw Error(where + "arrival rate lambda must be positive");
  }
  if (!(c.mu > 0.0) || !std::isfinite(c.mu)) {
    throw Error(where + "service rate mu must be positive");
  }
  if (!(c.revenue >= 0.0) || !std::isfinite(c.revenue)) {
    throw Error(where + "revenue b must be non-negative");
  }
  if (!(c.deadline > 0.0) || !std::isfinite(c.deadline)) {
    throw Error(where + "deadline R must be positive");
  }
}

} // namespace

double availability(const AvailabilityModel& model) {
  if (model.scenarios.empty()) {
    throw Error("availability model needs at least one scenario");
  }
  double total_p = 0.0;
  double value = 0.0;
  for (std::size_t i = 0; i < model.scenarios.size(); ++i) {
    const auto& s = model.scenarios[i];
    if (!(s.probability >= 0.0 && s.probability <= 1.0)) {
      throw Error("scenario " + std::to_string(i) + ": probability must lie in [0, 1]");
    }
    if (!(s.availability >= 0.0 && s.availability <= 1.0)) {
      throw Error("scenario " + std::to_string(i) + ": availability must lie in [0, 1]");
    }
    total_p += s.probability;
    value += s.probability * s.availability;
  }
  if (std::fabs(total_p - 1.0) > kProbabilityTolerance) {
    throw Error("scenario probabilities sum to " + std::to_string(total_p) + ", expected 1");
  }
  return value;
}

void AllocationProblem::validate() const {
  if (classes.empty()) {
    throw Error("allocation problem needs at least one service class");
  }
  if (servers < 1) {
    throw Error("server budget N must be at least 1");
  }
  for (std::size_t i = 0; i < classes.size(); ++i) {
    check_class(classes[i], i);
  }
}

double deadline_meet_prob(const ServiceClass& c, std::int64_t n) {
  const double capacity = static_cast<double>(n) * c.mu;
  if (!(capacity > c.lambda)) {
    throw Error("unstable queue: stability requires n * mu > lambda (n = " + std::to_string(n) +
                ", mu = " + std::to_string(c.mu) + ", lambda = " + std::to_string(c.lambda) + ")");
  }
  return -std::expm1(-(capacity - c.lambda) * c.deadline);
}

double marginal_gain(const ServiceClass& c, std::int64_t n) {
  const double slack = static_cast<double>(n) * c.mu - c.lambda;
  return c.lambda * c.revenue * std::exp(-slack * c.deadline) * -std::expm1(-c.mu * c.deadline);
}

double objective(const AllocationProblem& p, const Counts& n) {
  p.validate();
  if (n.size() != p.classes.size()) {
    throw Error("allocation has " + std::to_string(n.size()) + " entries for " +
                std::to_string(p.classes.size()) + " classes");
  }
  const std::int64_t used = std::accumulate(n.begin(), n.end(), std::int64_t{0});
  if (used != p.servers) {
    throw Error("budget constraint violated: sum of n_i = " + std::to_string(used) +
                " but N = " + std::to_string(p.servers));
  }
  double value = 0.0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    const auto& c = p.classes[i];
    if (!(static_cast<double>(n[i]) > c.utilization())) {
      throw Error("utilization constraint violated for class " + std::to_string(i) +
                  ": n_i must exceed rho_i = lambda/mu = " + std::to_string(c.utilization()));
    }
    value += c.lambda * c.revenue * deadline_meet_prob(c, n[i]);
  }
  return value;
}

MinimumCounts min_feasible(const AllocationProblem& p) {
  p.validate();
  MinimumCounts out;
  for (const auto& c : p.classes) {
    const double rho = c.utilization();
    auto n = static_cast<std::int64_t>(std::floor(rho)) + 1;
    // lambda/mu is rounded; make sure n * mu > lambda holds exactly as evaluated.
    while (!(static_cast<double>(n) * c.mu > c.lambda)) {
      ++n;
    }
    out.n.push_back(n);
    out.required += n;
  }
  out.feasible = out.required <= p.servers;
  return out;
}

namespace {

Infeasible infeasible_from(const MinimumCounts& mins, std::int64_t budget) {
  return Infeasible{mins.n, mins.required, budget};
}

} // namespace

AllocationResult optimize_greedy(const AllocationProblem& p) {
  const auto mins = min_feasible(p);
  if (!mins.feasible) {
    return infeasible_from(mins, p.servers);
  }
  Counts n = mins.n;
  for (std::int64_t spare = p.servers - mins.required; spare > 0; --spare) {
    std::size_t best = 0;
    double best_gain = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n.size(); ++i) {
      const double gain = marginal_gain(p.classes[i], n[i]);
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    ++n[best];
  }
  const double value = objective(p, n);
  return Allocation{std::move(n), value};
}

std::uint64_t composition_count(const AllocationProblem& p) {
  const auto mins = min_feasible(p);
  if (!mins.feasible) {
    return 0;
  }
  // C(spare + m - 1, m - 1), built up multiplicatively with saturation.
  const auto spare = static_cast<std::uint64_t>(p.servers - mins.required);
  const std::uint64_t m = p.classes.size();
  std::uint64_t count = 1;
  for (std::uint64_t i = 1; i < m; ++i) {
    // count * (spare + i) / i stays integral at every step. The floating
    // estimate screens overflow; below the limit the product fits in 64 bits.
    const double estimate =
        static_cast<double>(count) * (static_cast<double>(spare) + static_cast<double>(i)) /
        static_cast<double>(i);
    if (estimate > static_cast<double>(kBruteForceLimit) + 0.5) {
      return kBruteForceLimit + 1;
    }
    count = count * (spare + i) / i;
  }
  return count;
}

namespace {

void enumerate(const AllocationProblem& p, const Counts& mins, std::size_t i, std::int64_t left,
               Counts& n, Allocation& best, bool& found) {
  const std::size_t m = p.classes.size();
  if (i + 1 == m) {
    n[i] = mins[i] + left;
    double value = 0.0;
    for (std::size_t c = 0; c < m; ++c) {
      value += p.classes[c].lambda * p.classes[c].revenue * deadline_meet_prob(p.classes[c], n[c]);
    }
    // Lexicographic visiting order plus strict improvement keeps the smallest tie.
    if (!found || value > best.objective) {
      best.n = n;
      best.objective = value;
      found = true;
    }
    return;
  }
  for (std::int64_t extra = 0; extra <= left; ++extra) {
    n[i] = mins[i] + extra;
    enumerate(p, mins, i + 1, left - extra, n, best, found);
  }
}

} // namespace

AllocationResult optimize_bruteforce(const AllocationProblem& p) {
  const auto mins = min_feasible(p);
  if (!mins.feasible) {
    return infeasible_from(mins, p.servers);
  }
  if (composition_count(p) > kBruteForceLimit) {
    throw Error("brute-force search space exceeds " + std::to_string(kBruteForceLimit) +
                " allocations");
  }
  Counts n(p.classes.size(), 0);
  Allocation best;
  bool found = false;
  enumerate(p, mins.n, 0, p.servers - mins.required, n, best, found);
  return best;
}

AllocationProblem problem_from_json(const nlohmann::json& j) {
  AllocationProblem p;
  try {
    p.servers = j.at("N").get<std::int64_t>();
    for (const auto& c : j.at("classes")) {
      p.classes.push_back(ServiceClass{c.at("lambda").get<double>(), c.at("mu").get<double>(),
                                       c.at("b").get<double>(), c.at("R").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed allocation problem: ") + e.what());
  }
  p.validate();
  return p;
}

nlohmann::json problem_to_json(const AllocationProblem& p) {
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& c : p.classes) {
    classes.push_back({{"lambda", c.lambda}, {"mu", c.mu}, {"b", c.revenue}, {"R", c.deadline}});
  }
  return {{"N", p.servers}, {"classes", std::move(classes)}};
}

AvailabilityModel availability_from_json(const nlohmann::json& j) {
  AvailabilityModel model;
  try {
    for (const auto& s : j.at("scenarios")) {
      if (!s.is_array() || s.size() != 2) {
        throw Error("each scenario must be a [probability, availability] pair");
      }
      model.scenarios.push_back({s[0].get<double>(), s[1].get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed availability model: ") + e.what());
  }
  return model;
}

nlohmann::json result_to_json(const AllocationResult& r) {
  if (const auto* a = std::get_if<Allocation>(&r)) {
    return {{"n", a->n}, {"objective", a->objective}};
  }
  const auto& inf = std::get<Infeasible>(r);
  return {{"infeasible", {{"required", inf.required}, {"budget", inf.budget}}}};
}

} // namespace daas::slaopt
