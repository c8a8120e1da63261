#pragma once

#include "uplift/common.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace uplift {

enum class FeatureKind { numeric, categorical };

// Missing values are stored as NaN regardless of feature kind; categorical
// values are label ids (indices into FeatureInfo::labels) stored as doubles.
inline double missing_value() { return std::numeric_limits<double>::quiet_NaN(); }
inline bool is_missing(double v) { return std::isnan(v); }

struct FeatureInfo {
    std::string name;
    FeatureKind kind = FeatureKind::numeric;
    std::vector<std::string> labels;  // categorical: id -> label, first-appearance order

    int label_id(const std::string& s) const {
        for (std::size_t i = 0; i < labels.size(); ++i)
            if (labels[i] == s) return static_cast<int>(i);
        return -1;
    }

    int intern(const std::string& s) {
        int id = label_id(s);
        if (id >= 0) return id;
        labels.push_back(s);
        return static_cast<int>(labels.size()) - 1;
    }
};

struct Schema {
    std::vector<FeatureInfo> features;

    std::size_t size() const { return features.size(); }

    int index_of(const std::string& name) const {
        for (std::size_t i = 0; i < features.size(); ++i)
            if (features[i].name == name) return static_cast<int>(i);
        return -1;
    }
};

struct Record {
    std::vector<double> features;          // aligned to the schema
    int outcome = 0;                       // {0, 1}; 1 is the successful outcome
    std::optional<double> survival_time;   // present only before survival_to_binary
};

struct UpliftDataset {
    Schema schema;
    std::vector<Record> treatment;
    std::vector<Record> control;

    std::size_t n_treatment() const { return treatment.size(); }
    std::size_t n_control() const { return control.size(); }

    void validate() const {
        if (treatment.empty()) throw ValidationError("dataset: treatment group is empty");
        if (control.empty()) throw ValidationError("dataset: control group is empty");
        auto check = [&](const std::vector<Record>& recs, const char* tag) {
            for (const Record& r : recs) {
                if (r.features.size() != schema.size())
                    throw ValidationError(std::string("dataset: ") + tag +
                                          " record does not match the feature schema");
                if (r.outcome != 0 && r.outcome != 1)
                    throw ValidationError(std::string("dataset: ") + tag + " outcome not in {0,1}");
            }
        };
        check(treatment, "treatment");
        check(control, "control");
    }
};

// ---------------------------------------------------------------------------
// number formatting/parsing: shortest round-trip via to_chars/from_chars
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline bool parse_double(std::string_view s, double& out) {
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last && std::isfinite(out);
}

// ---------------------------------------------------------------------------
// CSV schema: header row; `group` column with values T/C; `outcome` (0/1) or
// `time` (non-negative, survival mode); every other column is a feature whose
// kind is inferred (numeric iff all non-empty cells parse as finite numbers).
// Empty cells are missing values.
// ---------------------------------------------------------------------------

struct CsvColumns {
    std::string group = "group";
    std::string outcome = "outcome";
    std::string time = "time";
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

// RFC4180-lite: comma separated, optional double-quoted fields with "" escapes
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') { cur += '"'; ++i; }
                else quoted = false;
            } else cur += ch;
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline bool needs_quoting(const std::string& s) {
    return s.find_first_of(",\"\n\r") != std::string::npos;
}

inline std::string quote_csv(const std::string& s) {
    if (!needs_quoting(s)) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace detail

inline UpliftDataset load_csv(const std::string& path, const CsvColumns& cols = {}) {
    std::ifstream in(path);
    if (!in) throw ValidationError("load_csv: cannot open '" + path + "'");

    std::string line;
    if (!std::getline(in, line)) throw SchemaError("load_csv: empty file '" + path + "'");
    const std::vector<std::string> header = detail::split_csv_line(line);

    int group_col = -1, outcome_col = -1, time_col = -1;
    std::vector<int> feature_cols;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == cols.group) group_col = static_cast<int>(i);
        else if (header[i] == cols.outcome) outcome_col = static_cast<int>(i);
        else if (header[i] == cols.time) time_col = static_cast<int>(i);
        else feature_cols.push_back(static_cast<int>(i));
    }
    if (group_col < 0)
        throw SchemaError("load_csv: required column '" + cols.group + "' not found");
    if (outcome_col < 0 && time_col < 0)
        throw SchemaError("load_csv: neither '" + cols.outcome + "' nor '" + cols.time +
                          "' column found");
    const bool survival_mode = outcome_col < 0;

    std::vector<std::vector<std::string>> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
        std::vector<std::string> cells = detail::split_csv_line(line);
        if (cells.size() != header.size())
            throw ParseError("load_csv: line " + std::to_string(line_no) + " has " +
                             std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(header.size()));
        rows.push_back(std::move(cells));
    }

    // infer feature kinds
    UpliftDataset ds;
    for (int fc : feature_cols) {
        FeatureInfo info;
        info.name = header[fc];
        info.kind = FeatureKind::numeric;
        for (const auto& row : rows) {
            const std::string& cell = row[fc];
            double v;
            if (!cell.empty() && !parse_double(cell, v)) {
                info.kind = FeatureKind::categorical;
                break;
            }
        }
        ds.schema.features.push_back(std::move(info));
    }

    for (std::size_t ri = 0; ri < rows.size(); ++ri) {
        const auto& row = rows[ri];
        Record rec;
        rec.features.reserve(feature_cols.size());
        for (std::size_t fi = 0; fi < feature_cols.size(); ++fi) {
            const std::string& cell = row[feature_cols[fi]];
            FeatureInfo& info = ds.schema.features[fi];
            if (cell.empty()) {
                rec.features.push_back(missing_value());
            } else if (info.kind == FeatureKind::numeric) {
                double v;
                if (!parse_double(cell, v))
                    throw ParseError("load_csv: bad numeric value '" + cell + "' in column '" +
                                     info.name + "'");
                rec.features.push_back(v);
            } else {
                rec.features.push_back(static_cast<double>(info.intern(cell)));
            }
        }
        if (survival_mode) {
            double t;
            const std::string& cell = row[time_col];
            if (cell.empty() || !parse_double(cell, t) || t < 0.0)
                throw ParseError("load_csv: bad survival time '" + cell + "'");
            rec.survival_time = t;
            rec.outcome = 0;  // placeholder until survival_to_binary
        } else {
            const std::string& cell = row[outcome_col];
            if (cell == "0") rec.outcome = 0;
            else if (cell == "1") rec.outcome = 1;
            else throw ParseError("load_csv: non-binary outcome '" + cell + "'");
        }
        const std::string& grp = row[group_col];
        if (grp == "T") ds.treatment.push_back(std::move(rec));
        else if (grp == "C") ds.control.push_back(std::move(rec));
        else throw ParseError("load_csv: group value '" + grp + "' is not T or C");
    }

    if (ds.treatment.empty()) throw ValidationError("load_csv: no treatment (T) rows");
    if (ds.control.empty()) throw ValidationError("load_csv: no control (C) rows");
    return ds;
}

inline void write_csv(const UpliftDataset& d, const std::string& path,
                      const CsvColumns& cols = {}) {
    const bool survival_mode =
        (!d.treatment.empty() && d.treatment.front().survival_time.has_value()) ||
        (!d.control.empty() && d.control.front().survival_time.has_value());

    std::ofstream out(path);
    if (!out) throw ValidationError("write_csv: cannot open '" + path + "' for writing");

    out << cols.group << ',' << (survival_mode ? cols.time : cols.outcome);
    for (const auto& f : d.schema.features) out << ',' << detail::quote_csv(f.name);
    out << '\n';

    auto write_group = [&](const std::vector<Record>& recs, const char* tag) {
        for (const Record& r : recs) {
            out << tag << ',';
            if (survival_mode) {
                if (!r.survival_time)
                    throw ValidationError("write_csv: record without survival time in survival mode");
                out << format_double(*r.survival_time);
            } else {
                out << r.outcome;
            }
            for (std::size_t fi = 0; fi < r.features.size(); ++fi) {
                out << ',';
                const double v = r.features[fi];
                if (is_missing(v)) continue;
                const FeatureInfo& info = d.schema.features[fi];
                if (info.kind == FeatureKind::numeric)
                    out << format_double(v);
                else
                    out << detail::quote_csv(info.labels.at(static_cast<std::size_t>(v)));
            }
            out << '\n';
        }
    };
    write_group(d.treatment, "T");
    write_group(d.control, "C");
}

// ---------------------------------------------------------------------------
// survival-to-binary conversion: outcome = 1 iff observed time >= threshold.
// Default threshold = pooled median of observed times (lower median for even
// counts).  Censoring is ignored by design of the conversion.
// ---------------------------------------------------------------------------
inline UpliftDataset survival_to_binary(const UpliftDataset& d,
                                        std::optional<double> threshold = std::nullopt) {
    if (threshold && !(*threshold > 0.0))
        throw ValidationError("survival_to_binary: threshold must be positive");

    std::vector<double> times;
    times.reserve(d.treatment.size() + d.control.size());
    auto collect = [&](const std::vector<Record>& recs) {
        for (const Record& r : recs) {
            if (!r.survival_time)
                throw ValidationError("survival_to_binary: record without survival time");
            times.push_back(*r.survival_time);
        }
    };
    collect(d.treatment);
    collect(d.control);
    if (times.empty()) throw ValidationError("survival_to_binary: empty dataset");

    double theta;
    if (threshold) {
        theta = *threshold;
    } else {
        const std::size_t k = (times.size() - 1) / 2;  // lower median
        std::nth_element(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(k), times.end());
        theta = times[k];
    }

    UpliftDataset out;
    out.schema = d.schema;
    auto convert = [&](const std::vector<Record>& src, std::vector<Record>& dst) {
        dst.reserve(src.size());
        for (const Record& r : src) {
            Record n = r;
            n.outcome = (*r.survival_time >= theta) ? 1 : 0;
            n.survival_time.reset();
            dst.push_back(std::move(n));
        }
    };
    convert(d.treatment, out.treatment);
    convert(d.control, out.control);
    return out;
}

// ---------------------------------------------------------------------------
// stratified train/test split: sampling without replacement independently
// within each group; train size per group = round(fraction * N).
// ---------------------------------------------------------------------------
inline std::pair<UpliftDataset, UpliftDataset> split_train_test(const UpliftDataset& d,
                                                                double train_fraction,
                                                                std::uint64_t seed) {
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
        throw ValidationError("split_train_test: train fraction must lie in (0, 1)");

    Rng rng(seed);  // consumed by the treatment shuffle first, then control

    UpliftDataset train, test;
    train.schema = d.schema;
    test.schema = d.schema;

    auto split_group = [&](const std::vector<Record>& recs, std::vector<Record>& tr,
                           std::vector<Record>& te) {
        const std::size_t n = recs.size();
        const auto n_train =
            static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
        if (n_train == 0 || n_train >= n)
            throw ValidationError("split_train_test: group too small, a side would be empty");
        std::vector<std::size_t> idx(n);
        for (std::size_t i = 0; i < n; ++i) idx[i] = i;
        for (std::size_t i = n - 1; i > 0; --i) std::swap(idx[i], idx[rng.index(i + 1)]);
        std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
        std::sort(idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
        for (std::size_t i = 0; i < n; ++i)
            (i < n_train ? tr : te).push_back(recs[idx[i]]);
    };
    split_group(d.treatment, train.treatment, test.treatment);
    split_group(d.control, train.control, test.control);
    return {std::move(train), std::move(test)};
}

}  // namespace uplift
