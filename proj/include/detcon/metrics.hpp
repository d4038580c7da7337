#pragma once

// Post-run aggregation: per-agent communication statistics, tail
// tracking error against the analytic bound, comparison tables.

#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include "detcon/engine.hpp"

namespace detcon {

struct RunSummary {
    std::string name;
    std::vector<int> event_count;
    std::vector<int> rebroadcast_count;
    Vector min_gap;    ///< +infinity when an agent sampled fewer than twice
    Vector mean_gap;
    Vector tail_error_per_agent;
    double tail_error = 0.0;  ///< max over agents
    double bound_margin = std::numeric_limits<double>::quiet_NaN();
    double tail_fraction = 0.2;
};

inline RunSummary summarize(const RunRecord& rec, double tail_fraction = -1.0) {
    if (tail_fraction < 0.0) tail_fraction = rec.tail_fraction;
    const int n = rec.agents();
    RunSummary s;
    s.name = rec.scenario_name;
    s.tail_fraction = tail_fraction;
    s.min_gap.resize(n);
    s.mean_gap.resize(n);
    for (int i = 0; i < n; ++i) {
        const auto& st = rec.stats[static_cast<std::size_t>(i)];
        s.event_count.push_back(st.sample_count);
        s.rebroadcast_count.push_back(st.rebroadcast_count);
        s.min_gap(i) = st.min_gap;
        s.mean_gap(i) = st.mean_gap;
    }
    s.tail_error_per_agent = rec.tail_error_per_agent(tail_fraction);
    s.tail_error = s.tail_error_per_agent.maxCoeff();
    if (rec.bounds.has_ultimate_bound()) {
        s.bound_margin = (rec.bounds.ultimate_bound - s.tail_error_per_agent).minCoeff();
    }
    return s;
}

inline void write_summary_csv(std::ostream& os, const std::vector<RunSummary>& summaries) {
    os << "scenario,agent,event_count,rebroadcast_count,min_gap,mean_gap,tail_error,"
          "bound_margin\n";
    for (const auto& s : summaries) {
        for (std::size_t i = 0; i < s.event_count.size(); ++i) {
            const auto idx = static_cast<Eigen::Index>(i);
            os << s.name << ',' << i + 1 << ',' << s.event_count[i] << ','
               << s.rebroadcast_count[i] << ',' << s.min_gap(idx) << ',' << s.mean_gap(idx) << ','
               << s.tail_error_per_agent(idx) << ',' << s.bound_margin << '\n';
        }
    }
}

}  // namespace detcon
