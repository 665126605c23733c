#pragma once

// Crowdsourcing datasets as plain text: a label file with one `worker,item,label`
// record per line and an optional truth file with `item,label` records. Lines
// that are blank or start with '#' are skipped. Worker and item ids are opaque
// strings, re-indexed densely in numeric order when every id is an integer and
// in lexicographic order otherwise. Labels must be positive integers and are
// used as class ids directly; Nc is the largest class seen in either file.

#include "misc/errors.hpp"
#include "misc/labels.hpp"

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace misc {

struct Dataset {
    std::string name;
    std::vector<std::string> worker_ids;
    std::vector<std::string> item_ids;
    LabelMatrix labels;
    // Per item, 0 when unknown; empty when no truth file was given.
    Truth truth;
    // (worker, item) pairs seen more than once; the last record wins.
    std::size_t duplicates = 0;
    // Truth records whose item never occurs in the label file.
    std::vector<std::pair<std::string, int>> orphan_truth;

    bool has_truth() const { return !truth.empty(); }
};

namespace detail {

struct LabelRecord {
    std::string worker;
    std::string item;
    int label;
};

struct TruthRecord {
    std::string item;
    int label;
};

inline std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_fields(std::string_view line)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

inline std::optional<long long> parse_integer(std::string_view s)
{
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

inline int parse_label(std::string_view token, const std::string& where)
{
    const auto v = parse_integer(token);
    if (!v || *v < 1 || *v > 1'000'000)
        throw ParseError(where + ": label '" + std::string(token) + "' is not a positive integer");
    return static_cast<int>(*v);
}

// Calls on_fields(fields, "source:line") for every non-comment line.
template <typename F>
void for_each_record(std::istream& in, const std::string& source, std::size_t arity, F on_fields)
{
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto fields = split_fields(body);
        const std::string where = source + ":" + std::to_string(lineno);
        if (fields.size() != arity || std::any_of(fields.begin(), fields.end(), [](auto f) { return f.empty(); }))
            throw ParseError(where + ": expected " + std::to_string(arity) + " comma-separated fields");
        on_fields(fields, where);
    }
}

// Dense index for each distinct id: numeric order if all ids are integers,
// lexicographic otherwise.
inline std::vector<std::string> ordered_ids(std::vector<std::string> ids)
{
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    const bool numeric = std::all_of(ids.begin(), ids.end(), [](const std::string& s) { return parse_integer(s).has_value(); });
    if (numeric)
        std::stable_sort(ids.begin(), ids.end(),
                         [](const std::string& a, const std::string& b) { return *parse_integer(a) < *parse_integer(b); });
    return ids;
}

inline std::map<std::string, std::size_t> index_of(const std::vector<std::string>& ids)
{
    std::map<std::string, std::size_t> idx;
    for (std::size_t n = 0; n < ids.size(); ++n) idx.emplace(ids[n], n);
    return idx;
}

} // namespace detail

// n_classes > 0 overrides the inferred class count (it must still cover every
// observed label).
inline Dataset parse_dataset(std::istream& labels_in, const std::string& labels_source, std::istream* truth_in = nullptr,
                             const std::string& truth_source = "truth", int n_classes = 0)
{
    std::vector<detail::LabelRecord> records;
    detail::for_each_record(labels_in, labels_source, 3, [&](const auto& f, const std::string& where) {
        records.push_back({std::string(f[0]), std::string(f[1]), detail::parse_label(f[2], where)});
    });
    if (records.empty()) throw ParseError(labels_source + ": no records");

    std::vector<detail::TruthRecord> truth_records;
    if (truth_in)
        detail::for_each_record(*truth_in, truth_source, 2, [&](const auto& f, const std::string& where) {
            truth_records.push_back({std::string(f[0]), detail::parse_label(f[1], where)});
        });

    Dataset ds;
    std::vector<std::string> workers, items;
    workers.reserve(records.size());
    items.reserve(records.size());
    int max_label = 0;
    for (const auto& r : records) {
        workers.push_back(r.worker);
        items.push_back(r.item);
        max_label = std::max(max_label, r.label);
    }
    for (const auto& t : truth_records) max_label = std::max(max_label, t.label);
    ds.worker_ids = detail::ordered_ids(std::move(workers));
    ds.item_ids = detail::ordered_ids(std::move(items));
    const auto worker_index = detail::index_of(ds.worker_ids);
    const auto item_index = detail::index_of(ds.item_ids);

    if (n_classes > 0 && n_classes < max_label)
        throw ParseError(labels_source + ": class override " + std::to_string(n_classes) + " below largest label " +
                         std::to_string(max_label));
    const int nc = n_classes > 0 ? n_classes : max_label;

    const std::size_t ni = ds.item_ids.size();
    std::vector<int> entries(ds.worker_ids.size() * ni, 0);
    for (const auto& r : records) {
        int& cell = entries[worker_index.at(r.worker) * ni + item_index.at(r.item)];
        if (cell != 0) ++ds.duplicates;
        cell = r.label;
    }
    ds.labels = LabelMatrix(ds.worker_ids.size(), ni, std::move(entries), nc);

    if (truth_in) {
        ds.truth.assign(ni, 0);
        for (const auto& t : truth_records) {
            const auto it = item_index.find(t.item);
            if (it == item_index.end())
                ds.orphan_truth.emplace_back(t.item, t.label);
            else
                ds.truth[it->second] = t.label;
        }
    }
    return ds;
}

inline Dataset load_dataset(const std::string& labels_path, const std::optional<std::string>& truth_path = std::nullopt,
                            int n_classes = 0)
{
    std::ifstream labels_in(labels_path);
    if (!labels_in) throw ParseError("cannot open label file '" + labels_path + "'");
    std::ifstream truth_in;
    if (truth_path) {
        truth_in.open(*truth_path);
        if (!truth_in) throw ParseError("cannot open truth file '" + *truth_path + "'");
    }
    Dataset ds = parse_dataset(labels_in, labels_path, truth_path ? &truth_in : nullptr, truth_path.value_or(""),
                               n_classes);
    const auto slash = labels_path.find_last_of('/');
    ds.name = labels_path.substr(slash == std::string::npos ? 0 : slash + 1);
    if (const auto dot = ds.name.find_last_of('.'); dot != std::string::npos && dot > 0) ds.name.resize(dot);
    return ds;
}

// Label records in worker-major order, using the dataset's original ids.
inline void write_labels_csv(std::ostream& out, const Dataset& ds)
{
    for (std::size_t w = 0; w < ds.labels.n_workers(); ++w)
        for (std::size_t i = 0; i < ds.labels.n_items(); ++i)
            if (const int c = ds.labels(w, i); c != 0) out << ds.worker_ids[w] << ',' << ds.item_ids[i] << ',' << c << '\n';
}

inline void write_truth_csv(std::ostream& out, const Dataset& ds)
{
    for (std::size_t i = 0; i < ds.truth.size(); ++i)
        if (ds.truth[i] != 0) out << ds.item_ids[i] << ',' << ds.truth[i] << '\n';
}

// Ids "1".."n".
inline std::vector<std::string> numbered_ids(std::size_t n)
{
    std::vector<std::string> ids(n);
    for (std::size_t k = 0; k < n; ++k) ids[k] = std::to_string(k + 1);
    return ids;
}

} // namespace misc
