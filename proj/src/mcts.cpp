#include "pepa/mcts.hpp"

namespace pepa {

void PlannerConfig::validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("planner: exploration constant must be positive");
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw std::invalid_argument("planner: gamma must lie in [0,1]");
    if (budget < 1) throw std::invalid_argument("planner: budget must be >= 1");
    if (rollout_depth < 0) throw std::invalid_argument("planner: rollout_depth must be >= 0");
}

double uct_score(double q, double n_parent, double n_edge, double c) {
    if (!(n_parent >= 1.0) || !(n_edge >= 1.0)) throw std::domain_error("uct_score: visit counts must be >= 1");
    return q + c * std::sqrt(std::log(n_parent) / n_edge);
}

}  // namespace pepa
