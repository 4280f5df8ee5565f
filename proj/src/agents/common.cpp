#include "sibre/agents/common.hpp"

#include <sstream>

namespace sibre::agents {

std::string curves_to_csv(const std::vector<SeedCurve>& curves) {
    std::ostringstream os;
    os.precision(12);
    os << "seed,episode_or_window,return,rho,beta,epsilon,steps\n";
    for (const SeedCurve& c : curves)
        for (const EpisodeRecord& r : c.records)
            os << c.seed << ',' << r.index << ',' << r.ret << ',' << r.rho << ',' << r.beta
               << ',' << r.epsilon << ',' << r.steps << '\n';
    return os.str();
}

}  // namespace sibre::agents
