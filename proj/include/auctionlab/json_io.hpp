#pragma once

// JSON descriptors for distributions, strategies, auction configurations
// and results.

#include <string>
#include <vector>

#include <json.hpp>

#include "auctionlab/auction.hpp"
#include "auctionlab/optimize.hpp"
#include "auctionlab/robustness.hpp"

namespace auctionlab {

using nlohmann::json;

inline ValueDistribution distribution_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform") return ValueDistribution::uniform(j.at("lo"), j.at("hi"));
  if (kind == "lognormal")
    return ValueDistribution::lognormal(j.at("mu"), j.at("sigma"),
                                        j.value("truncation_quantile", kDefaultTruncationQuantile));
  if (kind == "exponential")
    return ValueDistribution::exponential(j.at("rate"),
                                          j.value("truncation_quantile", kDefaultTruncationQuantile));
  if (kind == "empirical")
    return ValueDistribution::empirical(j.at("samples").get<std::vector<double>>());
  if (kind == "tabulated")
    return ValueDistribution::tabulated(j.at("x").get<std::vector<double>>(),
                                        j.at("cdf").get<std::vector<double>>());
  throw std::invalid_argument("unknown distribution kind: " + kind);
}

inline json distribution_to_json(const ValueDistribution& d) {
  // Enough to identify the construction in output manifests.
  json j;
  switch (d.kind()) {
    case DistKind::uniform: j["kind"] = "uniform"; break;
    case DistKind::lognormal: j["kind"] = "lognormal"; break;
    case DistKind::exponential: j["kind"] = "exponential"; break;
    case DistKind::empirical: j["kind"] = "empirical"; break;
    case DistKind::tabulated: j["kind"] = "tabulated"; break;
  }
  j["support"] = {d.support_lo(), d.support_hi()};
  return j;
}

// Strategies that reference the value distribution (thresholded) are built
// against the bidder's own d.
inline BidStrategy strategy_from_json(const json& j, const ValueDistribution& d) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "truthful") return BidStrategy::truthful();
  if (kind == "linear") return BidStrategy::linear(j.at("alpha"));
  if (kind == "affine") return BidStrategy::affine(j.at("alpha"), j.at("c"));
  if (kind == "thresholded") {
    ThresholdedParams p;
    p.r = j.at("r");
    p.epsilon = j.value("epsilon", 0.0);
    if (j.contains("gamma")) p.gamma = strategy_from_json(j.at("gamma"), d);
    return make_thresholded(d, p);
  }
  throw std::invalid_argument("unknown strategy kind: " + kind);
}

inline std::string strategy_kind_name(StrategyKind k) {
  switch (k) {
    case StrategyKind::truthful: return "truthful";
    case StrategyKind::linear: return "linear";
    case StrategyKind::affine: return "affine";
    case StrategyKind::thresholded: return "thresholded";
    case StrategyKind::from_target: return "from_target";
    case StrategyKind::custom: return "custom";
  }
  return "unknown";
}

inline AuctionConfig auction_config_from_json(const json& j) {
  AuctionConfig cfg;
  const std::string mech = j.at("mechanism").get<std::string>();
  if (mech == "lazy_sp") cfg.mechanism = Mechanism::lazy_sp;
  else if (mech == "eager_sp") cfg.mechanism = Mechanism::eager_sp;
  else if (mech == "myerson") cfg.mechanism = Mechanism::myerson;
  else throw std::invalid_argument("unknown mechanism: " + mech);

  for (const auto& bj : j.at("bidders")) {
    ValueDistribution d = distribution_from_json(bj.at("distribution"));
    BidStrategy s = bj.contains("strategy") ? strategy_from_json(bj.at("strategy"), d)
                                            : BidStrategy::truthful();
    cfg.bidders.push_back({std::move(d), std::move(s)});
  }
  if (cfg.bidders.empty()) throw std::invalid_argument("auction config: needs >= 1 bidder");

  if (j.contains("reserve_policy")) {
    const auto& rp = j.at("reserve_policy");
    const std::string kind = rp.at("kind").get<std::string>();
    if (kind == "exact_monopoly_per_bidder") cfg.reserve_policy = ReservePolicy::exact();
    else if (kind == "erm_per_bidder")
      cfg.reserve_policy = ReservePolicy::erm(rp.at("n_samples"), rp.value("seed", 0));
    else if (kind == "fixed")
      cfg.reserve_policy = ReservePolicy::fixed(rp.at("reserves").get<std::vector<double>>());
    else throw std::invalid_argument("unknown reserve policy: " + kind);
  }
  cfg.seller_welfare_benevolent = j.value("seller_welfare_benevolent", true);
  return cfg;
}

inline json outcome_to_json(const OutcomeStats& o) {
  return json{{"utility", o.utility},
              {"utility_stderr", o.utility_stderr},
              {"seller_revenue", o.seller_revenue},
              {"seller_revenue_stderr", o.seller_revenue_stderr},
              {"welfare", o.welfare},
              {"welfare_stderr", o.welfare_stderr},
              {"allocation_probability", o.allocation_probability},
              {"allocation_probability_stderr", o.allocation_probability_stderr},
              {"reserve_prices", o.reserve_prices}};
}

inline json solver_result_to_json(const SolverResult& r, const std::string& value_name) {
  return json{{value_name, r.value},
              {"residual", r.residual},
              {"iterations", r.iterations},
              {"bracket", {r.bracket_lo, r.bracket_hi}}};
}

}  // namespace auctionlab
