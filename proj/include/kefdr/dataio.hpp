#ifndef KEFDR_DATAIO_HPP
#define KEFDR_DATAIO_HPP

#include <set>
#include <string>
#include <vector>

#include "kefdr/matrix.hpp"
#include "kefdr/procedures.hpp"

namespace kefdr {

// Regression dataset: real response, binary mutation indicators. Labels
// encode (position, mutation) with a leading integer position, e.g. "90M".
struct Dataset {
    std::string drug;
    std::vector<std::string> sample_ids;
    Vector response;
    Matrix covariates;
    std::vector<std::string> labels;
};

// Inner join of the resistance and mutation tables on the sample-id column;
// rows with a missing response for the chosen drug are dropped. When
// log_transform is set the response is log-transformed (file stores raw
// fold-change).
Dataset load_dataset(const std::string& resistance_csv, const std::string& mutation_csv,
                     const std::string& drug, bool log_transform = false);

// Drop mutations appearing in fewer than 3 samples, then deduplicate
// byte-identical columns keeping the first by label order.
Dataset preprocess(const Dataset& ds);

struct PanelComparison {
    std::set<int> selected_positions;
    int in_panel = 0;
    int novel = 0;
};

int label_position(const std::string& label);

PanelComparison compare_panel(const DecisionReport& report,
                              const std::vector<std::string>& labels,
                              const std::set<int>& panel_positions);

std::set<int> load_panel(const std::string& path);

} // namespace kefdr

#endif
