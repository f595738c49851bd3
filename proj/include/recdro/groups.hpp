#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "recdro/data.hpp"

namespace recdro {

// Item occurrence counts over training prefixes only (val/test excluded).
struct ItemFrequencyTable {
    std::vector<std::uint64_t> freq;  // indexed by item id, [0] unused
    std::uint64_t total = 0;
};

struct QuantileSplit {
    std::string name;                  // "33" | "2060" | "1080"
    std::array<double, 3> fractions;   // bottom, middle, top; sum to 1

    static QuantileSplit named(const std::string& name);
};

// dsplit: boundaries on cumulative training-interaction mass (the paper's
// group-size accounting). usplit: plain user-rank quantiles.
enum class QuantileMode { data, user };

enum class GroupScheme { popularity, sequence_length, intersecting };

GroupScheme scheme_from_string(const std::string& s);
std::string to_string(GroupScheme s);
std::string to_string(QuantileMode m);
QuantileMode quantile_mode_from_string(const std::string& s);

inline constexpr std::array<const char*, 3> kPopLabels = {"niche", "diverse", "popular"};
inline constexpr std::array<const char*, 3> kSeqLabels = {"short", "medium", "long"};

struct GroupAssignment {
    GroupScheme scheme = GroupScheme::popularity;
    QuantileMode mode = QuantileMode::data;
    QuantileSplit split_pop;
    QuantileSplit split_seq;
    // Per-user label index 0/1/2 (bottom/middle/top); empty when the axis is inactive.
    std::vector<std::int8_t> labels_pop;
    std::vector<std::int8_t> labels_seq;
    // Achieved shares, for the manifest.
    std::array<double, 3> usplit_pop{}, dsplit_pop{};
    std::array<double, 3> usplit_seq{}, dsplit_seq{};

    bool has_pop() const { return !labels_pop.empty(); }
    bool has_seq() const { return !labels_seq.empty(); }
    const std::vector<std::int8_t>& labels(const std::string& axis) const;
};

ItemFrequencyTable item_frequencies(const std::vector<UserSequence>& sequences,
                                    std::size_t num_items);

// The ceil(top_fraction * |I|) most frequent items; ties by item index.
// Returned as an indicator over item ids.
std::vector<std::uint8_t> popular_item_set(const ItemFrequencyTable& freqs, double top_fraction = 0.2);

double popularity_ratio(const UserSequence& seq, const std::vector<std::uint8_t>& popular);

// Assigns bottom/middle/top labels from per-user scores. `masses` holds each
// user's training-interaction count, used by the data-mass interpretation.
std::vector<std::int8_t> assign_by_quantile(const std::vector<double>& scores,
                                            const std::vector<std::uint64_t>& masses,
                                            const QuantileSplit& split, QuantileMode mode);

struct AnnotateOptions {
    GroupScheme scheme = GroupScheme::popularity;
    QuantileSplit split_pop = QuantileSplit::named("33");
    QuantileSplit split_seq = QuantileSplit::named("33");
    QuantileMode mode = QuantileMode::data;
    double popular_top_fraction = 0.2;
};

GroupAssignment annotate(const Dataset& dataset, const std::vector<UserSequence>& sequences,
                         const AnnotateOptions& opts);

// JSON file: per-user labels plus split config and achieved shares.
void save_assignment(const GroupAssignment& a, const Dataset& dataset,
                     const std::filesystem::path& file);
GroupAssignment load_assignment(const std::filesystem::path& file, const Dataset& dataset);

}  // namespace recdro
