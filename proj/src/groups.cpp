#include "recdro/groups.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

namespace recdro {

namespace {
using json = nlohmann::ordered_json;
}

QuantileSplit QuantileSplit::named(const std::string& name) {
    if (name == "33") return {name, {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}};
    if (name == "2060") return {name, {0.2, 0.6, 0.2}};
    if (name == "1080") return {name, {0.1, 0.8, 0.1}};
    throw ConfigError("unknown quantile split '" + name + "' (expected 33, 2060 or 1080)");
}

GroupScheme scheme_from_string(const std::string& s) {
    if (s == "pop" || s == "popularity") return GroupScheme::popularity;
    if (s == "seq" || s == "sequence_length") return GroupScheme::sequence_length;
    if (s == "intersect" || s == "intersecting") return GroupScheme::intersecting;
    throw ConfigError("unknown group scheme '" + s + "'");
}

std::string to_string(GroupScheme s) {
    switch (s) {
        case GroupScheme::popularity: return "pop";
        case GroupScheme::sequence_length: return "seq";
        case GroupScheme::intersecting: return "intersect";
    }
    return "?";
}

std::string to_string(QuantileMode m) { return m == QuantileMode::data ? "data" : "user"; }

QuantileMode quantile_mode_from_string(const std::string& s) {
    if (s == "data") return QuantileMode::data;
    if (s == "user") return QuantileMode::user;
    throw ConfigError("unknown quantile mode '" + s + "' (expected data or user)");
}

const std::vector<std::int8_t>& GroupAssignment::labels(const std::string& axis) const {
    if (axis == "pop" && has_pop()) return labels_pop;
    if (axis == "seq" && has_seq()) return labels_seq;
    throw ConfigError("group axis '" + axis + "' not present in assignment");
}

ItemFrequencyTable item_frequencies(const std::vector<UserSequence>& sequences,
                                    std::size_t num_items) {
    if (sequences.empty()) throw DataError("item_frequencies: no sequences");
    ItemFrequencyTable t;
    t.freq.assign(num_items + 1, 0);
    for (const auto& s : sequences)
        for (const auto item : s.train_prefix()) {
            if (item == 0 || item > num_items) throw DataError("item index out of range");
            ++t.freq[item];
            ++t.total;
        }
    return t;
}

std::vector<std::uint8_t> popular_item_set(const ItemFrequencyTable& freqs, double top_fraction) {
    if (!(top_fraction > 0.0 && top_fraction < 1.0))
        throw ConfigError("top_fraction must be in (0,1)");
    const std::size_t num_items = freqs.freq.size() - 1;
    if (num_items == 0 || freqs.total == 0) throw DataError("popular_item_set: empty table");

    std::vector<std::uint32_t> order(num_items);
    std::iota(order.begin(), order.end(), 1u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (freqs.freq[a] != freqs.freq[b]) return freqs.freq[a] > freqs.freq[b];
        return a < b;
    });

    const auto take = static_cast<std::size_t>(std::ceil(top_fraction * static_cast<double>(num_items)));
    std::vector<std::uint8_t> popular(num_items + 1, 0);
    for (std::size_t i = 0; i < take && i < order.size(); ++i) popular[order[i]] = 1;
    return popular;
}

double popularity_ratio(const UserSequence& seq, const std::vector<std::uint8_t>& popular) {
    const auto prefix = seq.train_prefix();
    if (prefix.empty()) throw DataError("popularity_ratio: empty train prefix");
    std::size_t hits = 0;
    for (const auto item : prefix) hits += popular[item];
    return static_cast<double>(hits) / static_cast<double>(prefix.size());
}

std::vector<std::int8_t> assign_by_quantile(const std::vector<double>& scores,
                                            const std::vector<std::uint64_t>& masses,
                                            const QuantileSplit& split, QuantileMode mode) {
    const std::size_t n = scores.size();
    if (n < 3) throw DataError("assign_by_quantile: need at least 3 users");
    if (masses.size() != n) throw DataError("assign_by_quantile: masses/scores size mismatch");
    const double fsum = split.fractions[0] + split.fractions[1] + split.fractions[2];
    if (std::abs(fsum - 1.0) > 1e-9) throw ConfigError("split fractions must sum to 1");

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (scores[a] != scores[b]) return scores[a] < scores[b];
        return a < b;
    });

    std::vector<std::int8_t> labels(n, 1);
    if (mode == QuantileMode::user) {
        const auto n_bottom = static_cast<std::size_t>(std::floor(split.fractions[0] * static_cast<double>(n)));
        const auto n_top = static_cast<std::size_t>(std::floor(split.fractions[2] * static_cast<double>(n)));
        for (std::size_t r = 0; r < n; ++r) {
            if (r < n_bottom)
                labels[order[r]] = 0;
            else if (r >= n - n_top)
                labels[order[r]] = 2;
            else
                labels[order[r]] = 1;
        }
        return labels;
    }

    // Data mode: boundaries where cumulative training-interaction mass crosses
    // the split fractions. A user is in the bottom group while its inclusive
    // cumulative mass stays within the bottom fraction.
    double total = 0;
    for (const auto m : masses) total += static_cast<double>(m);
    const double t1 = split.fractions[0] * total;
    const double t2 = (split.fractions[0] + split.fractions[1]) * total;
    double cum = 0;
    for (std::size_t r = 0; r < n; ++r) {
        cum += static_cast<double>(masses[order[r]]);
        labels[order[r]] = cum <= t1 ? 0 : (cum <= t2 ? 1 : 2);
    }
    return labels;
}

namespace {

std::array<double, 3> user_shares(const std::vector<std::int8_t>& labels) {
    std::array<double, 3> c{};
    for (const auto l : labels) c[static_cast<std::size_t>(l)] += 1.0;
    for (auto& v : c) v = 100.0 * v / static_cast<double>(labels.size());
    return c;
}

std::array<double, 3> mass_shares(const std::vector<std::int8_t>& labels,
                                  const std::vector<std::uint64_t>& masses) {
    std::array<double, 3> c{};
    double total = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        c[static_cast<std::size_t>(labels[i])] += static_cast<double>(masses[i]);
        total += static_cast<double>(masses[i]);
    }
    for (auto& v : c) v = 100.0 * v / total;
    return c;
}

}  // namespace

GroupAssignment annotate(const Dataset& dataset, const std::vector<UserSequence>& sequences,
                         const AnnotateOptions& opts) {
    GroupAssignment a;
    a.scheme = opts.scheme;
    a.mode = opts.mode;
    a.split_pop = opts.split_pop;
    a.split_seq = opts.split_seq;

    std::vector<std::uint64_t> masses(sequences.size());
    for (std::size_t i = 0; i < sequences.size(); ++i)
        masses[i] = sequences[i].train_prefix().size();

    if (opts.scheme != GroupScheme::sequence_length) {
        const auto freqs = item_frequencies(sequences, dataset.num_items());
        const auto popular = popular_item_set(freqs, opts.popular_top_fraction);
        std::vector<double> scores(sequences.size());
        for (std::size_t i = 0; i < sequences.size(); ++i)
            scores[i] = popularity_ratio(sequences[i], popular);
        a.labels_pop = assign_by_quantile(scores, masses, opts.split_pop, opts.mode);
        a.usplit_pop = user_shares(a.labels_pop);
        a.dsplit_pop = mass_shares(a.labels_pop, masses);
    }
    if (opts.scheme != GroupScheme::popularity) {
        std::vector<double> scores(sequences.size());
        for (std::size_t i = 0; i < sequences.size(); ++i)
            scores[i] = static_cast<double>(sequences[i].train_prefix().size());
        a.labels_seq = assign_by_quantile(scores, masses, opts.split_seq, opts.mode);
        a.usplit_seq = user_shares(a.labels_seq);
        a.dsplit_seq = mass_shares(a.labels_seq, masses);
    }
    return a;
}

void save_assignment(const GroupAssignment& a, const Dataset& dataset,
                     const std::filesystem::path& file) {
    json j;
    j["scheme"] = to_string(a.scheme);
    j["quantile_mode"] = to_string(a.mode);
    if (a.has_pop()) {
        j["split_pop"] = a.split_pop.name;
        j["usplit_pop"] = a.usplit_pop;
        j["dsplit_pop"] = a.dsplit_pop;
    }
    if (a.has_seq()) {
        j["split_seq"] = a.split_seq.name;
        j["usplit_seq"] = a.usplit_seq;
        j["dsplit_seq"] = a.dsplit_seq;
    }
    json users = json::object();
    for (std::size_t u = 0; u < dataset.num_users(); ++u) {
        json entry = json::object();
        if (a.has_pop()) entry["pop"] = kPopLabels[static_cast<std::size_t>(a.labels_pop[u])];
        if (a.has_seq()) entry["seq"] = kSeqLabels[static_cast<std::size_t>(a.labels_seq[u])];
        users[dataset.users[u]] = std::move(entry);
    }
    j["users"] = std::move(users);
    write_file(file, j.dump() + "\n");
}

namespace {

std::int8_t label_index(const std::string& name, const std::array<const char*, 3>& names) {
    for (std::int8_t i = 0; i < 3; ++i)
        if (name == names[static_cast<std::size_t>(i)]) return i;
    throw DataError("unknown group label '" + name + "'");
}

}  // namespace

GroupAssignment load_assignment(const std::filesystem::path& file, const Dataset& dataset) {
    const json j = json::parse(read_file(file));
    GroupAssignment a;
    a.scheme = scheme_from_string(j.at("scheme").get<std::string>());
    a.mode = quantile_mode_from_string(j.at("quantile_mode").get<std::string>());
    const auto& users = j.at("users");
    const bool pop = a.scheme != GroupScheme::sequence_length;
    const bool seq = a.scheme != GroupScheme::popularity;
    if (pop) {
        a.split_pop = QuantileSplit::named(j.at("split_pop").get<std::string>());
        a.usplit_pop = j.at("usplit_pop").get<std::array<double, 3>>();
        a.dsplit_pop = j.at("dsplit_pop").get<std::array<double, 3>>();
        a.labels_pop.resize(dataset.num_users());
    }
    if (seq) {
        a.split_seq = QuantileSplit::named(j.at("split_seq").get<std::string>());
        a.usplit_seq = j.at("usplit_seq").get<std::array<double, 3>>();
        a.dsplit_seq = j.at("dsplit_seq").get<std::array<double, 3>>();
        a.labels_seq.resize(dataset.num_users());
    }
    for (std::size_t u = 0; u < dataset.num_users(); ++u) {
        const auto it = users.find(dataset.users[u]);
        if (it == users.end()) throw DataError("user " + dataset.users[u] + " missing group label");
        if (pop) a.labels_pop[u] = label_index(it->at("pop").get<std::string>(), kPopLabels);
        if (seq) a.labels_seq[u] = label_index(it->at("seq").get<std::string>(), kSeqLabels);
    }
    return a;
}

}  // namespace recdro
