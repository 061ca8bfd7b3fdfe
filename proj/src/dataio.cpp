#include "kefdr/dataio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>

#include "kefdr/csv.hpp"
#include "kefdr/errors.hpp"

namespace kefdr {

namespace {

bool missing(const std::string& s) {
    return s.empty() || s == "NA" || s == "na" || s == "NaN" || s == "nan";
}

double parse_number(const std::string& s, const std::string& where) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw SchemaError("non-numeric cell at " + where + ": '" + s + "'");
        return v;
    } catch (const std::invalid_argument&) {
        throw SchemaError("non-numeric cell at " + where + ": '" + s + "'");
    } catch (const std::out_of_range&) {
        throw SchemaError("out-of-range cell at " + where + ": '" + s + "'");
    }
}

int find_column(const csv::Table& t, const std::string& name, const std::string& path) {
    for (size_t j = 0; j < t.header.size(); ++j)
        if (t.header[j] == name) return static_cast<int>(j);
    throw SchemaError("missing column '" + name + "' in " + path);
}

} // namespace

Dataset load_dataset(const std::string& resistance_csv, const std::string& mutation_csv,
                     const std::string& drug, bool log_transform) {
    csv::Table res = csv::read(resistance_csv);
    csv::Table mut = csv::read(mutation_csv);
    if (res.header.empty() || mut.header.empty())
        throw SchemaError("empty header in dataset files");

    const int drug_col = find_column(res, drug, resistance_csv);
    if (drug_col == 0) throw SchemaError("first column must be the sample id");

    std::map<std::string, const std::vector<std::string>*> mut_by_id;
    for (const auto& row : mut.rows) {
        if (row.size() != mut.header.size())
            throw SchemaError("ragged row in " + mutation_csv);
        mut_by_id[row[0]] = &row;
    }

    Dataset ds;
    ds.drug = drug;
    ds.labels.assign(mut.header.begin() + 1, mut.header.end());
    const int p = static_cast<int>(ds.labels.size());

    std::vector<std::vector<double>> cov_rows;
    for (size_t r = 0; r < res.rows.size(); ++r) {
        const auto& row = res.rows[r];
        if (row.size() != res.header.size())
            throw SchemaError("ragged row in " + resistance_csv);
        if (missing(row[drug_col])) continue;
        auto it = mut_by_id.find(row[0]);
        if (it == mut_by_id.end()) continue;  // sample without genotype
        double y = parse_number(row[drug_col], "row " + std::to_string(r + 1) + ", column '" +
                                                   drug + "'");
        if (log_transform) {
            if (!(y > 0.0))
                throw SchemaError("log transform requires positive response at row " +
                                  std::to_string(r + 1));
            y = std::log(y);
        }
        const auto& mrow = *it->second;
        std::vector<double> cov(p);
        for (int j = 0; j < p; ++j) {
            const std::string& cell = mrow[j + 1];
            const double v =
                parse_number(cell, "sample '" + row[0] + "', column '" + ds.labels[j] + "'");
            if (v != 0.0 && v != 1.0)
                throw SchemaError("non-binary covariate at sample '" + row[0] + "', column '" +
                                  ds.labels[j] + "'");
            cov[j] = v;
        }
        ds.sample_ids.push_back(row[0]);
        ds.response.push_back(y);
        cov_rows.push_back(std::move(cov));
    }

    const int n = static_cast<int>(cov_rows.size());
    ds.covariates = Matrix(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) ds.covariates(i, j) = cov_rows[i][j];
    return ds;
}

Dataset preprocess(const Dataset& ds) {
    const int n = ds.covariates.rows();
    const int p = ds.covariates.cols();

    std::vector<int> keep;
    for (int j = 0; j < p; ++j) {
        int ones = 0;
        for (int i = 0; i < n; ++i)
            if (ds.covariates(i, j) == 1.0) ++ones;
        if (ones >= 3) keep.push_back(j);
    }

    // deduplicate byte-identical columns, first label wins
    std::vector<int> unique;
    for (int j : keep) {
        bool dup = false;
        for (int u : unique) {
            bool same = true;
            for (int i = 0; i < n && same; ++i)
                if (ds.covariates(i, j) != ds.covariates(i, u)) same = false;
            if (same) {
                dup = true;
                break;
            }
        }
        if (!dup) unique.push_back(j);
    }

    Dataset out;
    out.drug = ds.drug;
    out.sample_ids = ds.sample_ids;
    out.response = ds.response;
    out.covariates = Matrix(n, static_cast<int>(unique.size()));
    for (size_t jj = 0; jj < unique.size(); ++jj) {
        out.labels.push_back(ds.labels[unique[jj]]);
        for (int i = 0; i < n; ++i) out.covariates(i, static_cast<int>(jj)) =
            ds.covariates(i, unique[jj]);
    }
    return out;
}

int label_position(const std::string& label) {
    size_t i = 0;
    while (i < label.size() && std::isdigit(static_cast<unsigned char>(label[i]))) ++i;
    if (i == 0) throw LabelError("label '" + label + "' has no leading position integer");
    return std::stoi(label.substr(0, i));
}

PanelComparison compare_panel(const DecisionReport& report,
                              const std::vector<std::string>& labels,
                              const std::set<int>& panel_positions) {
    PanelComparison cmp;
    for (int j : report.rejected) {
        if (j < 0 || j >= static_cast<int>(labels.size()))
            throw LabelError("rejected index out of range of the label list");
        cmp.selected_positions.insert(label_position(labels[j]));
    }
    for (int pos : cmp.selected_positions) {
        if (panel_positions.count(pos))
            ++cmp.in_panel;
        else
            ++cmp.novel;
    }
    return cmp;
}

std::set<int> load_panel(const std::string& path) {
    csv::Table t = csv::read(path);
    std::set<int> panel;
    const int col = 0;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        if (t.rows[r].empty() || missing(t.rows[r][col])) continue;
        panel.insert(static_cast<int>(
            parse_number(t.rows[r][col], "panel row " + std::to_string(r + 1))));
    }
    return panel;
}

} // namespace kefdr
