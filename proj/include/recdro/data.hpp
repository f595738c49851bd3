#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "recdro/common.hpp"

namespace recdro {

// One raw (user, item, timestamp) event. Timestamps are epoch milliseconds
// for Retailrocket and epoch seconds for MovieLens; only their order matters.
struct Interaction {
    std::string user_id;
    std::string item_id;
    std::int64_t timestamp = 0;
    std::uint32_t source_order = 0;  // original file line index, unique per file
};

// Filtered dataset with dense indices. Users are 0-based; items are 1-based
// with index 0 reserved for padding.
struct Dataset {
    struct Event {
        std::uint32_t user;  // 0..|users|-1
        std::uint32_t item;  // 1..|items|
        std::int64_t ts;
        std::uint32_t order;
    };

    std::vector<std::string> users;  // index -> original user id
    std::vector<std::string> items;  // (index-1) -> original item id
    std::vector<Event> events;       // canonically sorted by (user, ts, order)

    std::size_t num_users() const { return users.size(); }
    std::size_t num_items() const { return items.size(); }
};

// Chronological history of one user with leave-one-out targets.
struct UserSequence {
    std::uint32_t user = 0;
    std::vector<std::uint32_t> history;  // full, sorted by (ts, source_order)

    std::span<const std::uint32_t> train_prefix() const {
        return {history.data(), history.size() - 2};
    }
    std::uint32_t val_target() const { return history[history.size() - 2]; }
    std::uint32_t test_target() const { return history.back(); }
};

struct PaddedInput {
    std::vector<std::uint32_t> tokens;  // length L, 0 = padding, left-padded
    std::vector<std::uint8_t> valid;    // 1 where tokens is a real item
    int valid_count() const;
};

// Parses Retailrocket events.csv, keeping only `view` events.
std::vector<Interaction> parse_retailrocket(std::istream& in);
// Parses MovieLens ratings.dat; every rating becomes an interaction.
std::vector<Interaction> parse_movielens(std::istream& in);

// Iterative core-k filter: removes users/items with fewer than k interactions
// until a fixpoint. Deterministic and independent of input order. Optionally
// de-duplicates (user, item) pairs first, keeping the earliest event.
Dataset core_filter(const std::vector<Interaction>& interactions, int k, bool dedup_pairs = false);

std::vector<UserSequence> build_sequences(const Dataset& dataset);

PaddedInput pad_truncate(std::span<const std::uint32_t> sequence, int max_len);

// Dataset artifact: events.bin (columnar binary) + index.json (id maps) +
// manifest.json carrying the content hash. Round-trips losslessly.
std::string save_dataset(const Dataset& dataset, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);
std::string dataset_content_hash(const std::filesystem::path& dir);

}  // namespace recdro
