#include "recdro/data.hpp"

#include <algorithm>
#include <charconv>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

namespace recdro {

namespace {

using json = nlohmann::ordered_json;

std::vector<std::string_view> split_view(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::int64_t parse_int64(std::string_view s, std::size_t line_no, const char* what) {
    std::int64_t v = 0;
    const auto* end = s.data() + s.size();
    const auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc() || res.ptr != end)
        throw ParseError(std::string("invalid ") + what + " field '" + std::string(s) + "'", line_no);
    return v;
}

void strip_cr(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

// Numeric-string comparison: shorter decimal strings sort first, ties by lex.
// Both datasets use canonical decimal ids, so this is a numeric order and,
// unlike first-appearance indexing, independent of input permutation.
bool id_less(const std::string& a, const std::string& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

}  // namespace

int PaddedInput::valid_count() const {
    int n = 0;
    for (auto v : valid) n += v;
    return n;
}

std::vector<Interaction> parse_retailrocket(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) return {};
    strip_cr(line);
    if (line != "timestamp,visitorid,event,itemid,transactionid")
        throw DataError("missing or unexpected events.csv header: '" + line + "'");

    std::vector<Interaction> out;
    std::size_t line_no = 1;
    std::uint32_t order = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        const auto fields = split_view(line, ',');
        if (fields.size() != 5)
            throw ParseError("expected 5 columns, got " + std::to_string(fields.size()), line_no);
        const std::uint32_t this_order = order++;
        if (fields[2] != "view") continue;
        Interaction it;
        it.timestamp = parse_int64(fields[0], line_no, "timestamp");
        if (it.timestamp < 0) throw ParseError("negative timestamp", line_no);
        it.user_id = std::string(fields[1]);
        it.item_id = std::string(fields[3]);
        it.source_order = this_order;
        if (it.user_id.empty() || it.item_id.empty())
            throw ParseError("empty visitorid or itemid", line_no);
        out.push_back(std::move(it));
    }
    return out;
}

std::vector<Interaction> parse_movielens(std::istream& in) {
    std::vector<Interaction> out;
    std::string line;
    std::size_t line_no = 0;
    std::uint32_t order = 0;
    while (std::getline(in, line)) {
        ++line_no;
        strip_cr(line);
        if (line.empty()) continue;
        // UserID::MovieID::Rating::Timestamp
        std::vector<std::string_view> fields;
        std::string_view rest = line;
        for (;;) {
            const std::size_t pos = rest.find("::");
            if (pos == std::string_view::npos) {
                fields.push_back(rest);
                break;
            }
            fields.push_back(rest.substr(0, pos));
            rest = rest.substr(pos + 2);
        }
        if (fields.size() != 4)
            throw ParseError("expected 4 ::-separated fields, got " + std::to_string(fields.size()),
                             line_no);
        Interaction it;
        it.user_id = std::string(fields[0]);
        it.item_id = std::string(fields[1]);
        parse_int64(fields[2], line_no, "rating");  // validated, then discarded
        it.timestamp = parse_int64(fields[3], line_no, "timestamp");
        if (it.timestamp < 0) throw ParseError("negative timestamp", line_no);
        it.source_order = order++;
        out.push_back(std::move(it));
    }
    return out;
}

Dataset core_filter(const std::vector<Interaction>& interactions, int k, bool dedup_pairs) {
    if (k < 1) throw ConfigError("core filter requires k >= 1");

    std::vector<const Interaction*> live;
    live.reserve(interactions.size());
    for (const auto& it : interactions) live.push_back(&it);

    if (dedup_pairs) {
        // Keep the earliest event of each (user, item) pair.
        std::sort(live.begin(), live.end(), [](const Interaction* a, const Interaction* b) {
            if (a->user_id != b->user_id) return id_less(a->user_id, b->user_id);
            if (a->item_id != b->item_id) return id_less(a->item_id, b->item_id);
            if (a->timestamp != b->timestamp) return a->timestamp < b->timestamp;
            return a->source_order < b->source_order;
        });
        live.erase(std::unique(live.begin(), live.end(),
                               [](const Interaction* a, const Interaction* b) {
                                   return a->user_id == b->user_id && a->item_id == b->item_id;
                               }),
                   live.end());
    }

    // Iterate removal until every surviving user and item has >= k events.
    // The fixpoint of this monotone removal is unique, so one full recount
    // per round is enough regardless of order.
    const auto threshold = static_cast<std::size_t>(k);
    for (;;) {
        std::unordered_map<std::string, std::size_t> user_count, item_count;
        for (const auto* it : live) {
            ++user_count[it->user_id];
            ++item_count[it->item_id];
        }
        const auto before = live.size();
        std::erase_if(live, [&](const Interaction* it) {
            return user_count[it->user_id] < threshold || item_count[it->item_id] < threshold;
        });
        if (live.size() == before) break;
    }
    if (live.empty()) throw DataError("dataset eliminated by core filter");

    Dataset ds;
    {
        std::vector<std::string> users, items;
        for (const auto* it : live) {
            users.push_back(it->user_id);
            items.push_back(it->item_id);
        }
        auto uniq = [](std::vector<std::string>& v) {
            std::sort(v.begin(), v.end(), id_less);
            v.erase(std::unique(v.begin(), v.end()), v.end());
        };
        uniq(users);
        uniq(items);
        ds.users = std::move(users);
        ds.items = std::move(items);
    }

    std::unordered_map<std::string, std::uint32_t> user_index, item_index;
    for (std::uint32_t i = 0; i < ds.users.size(); ++i) user_index[ds.users[i]] = i;
    for (std::uint32_t i = 0; i < ds.items.size(); ++i) item_index[ds.items[i]] = i + 1;

    ds.events.reserve(live.size());
    for (const auto* it : live)
        ds.events.push_back({user_index[it->user_id], item_index[it->item_id], it->timestamp,
                             it->source_order});
    std::sort(ds.events.begin(), ds.events.end(), [](const Dataset::Event& a, const Dataset::Event& b) {
        if (a.user != b.user) return a.user < b.user;
        if (a.ts != b.ts) return a.ts < b.ts;
        return a.order < b.order;
    });
    return ds;
}

std::vector<UserSequence> build_sequences(const Dataset& dataset) {
    std::vector<UserSequence> seqs(dataset.num_users());
    for (std::uint32_t u = 0; u < dataset.num_users(); ++u) seqs[u].user = u;
    // Events are already sorted by (user, ts, order).
    for (const auto& e : dataset.events) seqs[e.user].history.push_back(e.item);
    for (const auto& s : seqs)
        if (s.history.size() < 3)
            throw DataError("user " + dataset.users[s.user] + " has fewer than 3 interactions");
    return seqs;
}

PaddedInput pad_truncate(std::span<const std::uint32_t> sequence, int max_len) {
    if (max_len < 1) throw ConfigError("pad_truncate requires L >= 1");
    const auto L = static_cast<std::size_t>(max_len);
    PaddedInput out;
    out.tokens.assign(L, 0);
    out.valid.assign(L, 0);
    const std::size_t n = std::min(sequence.size(), L);
    const std::size_t offset = L - n;
    for (std::size_t i = 0; i < n; ++i) {
        out.tokens[offset + i] = sequence[sequence.size() - n + i];
        out.valid[offset + i] = 1;
    }
    return out;
}

namespace {

constexpr char kEventsMagic[8] = {'R', 'D', 'D', 'S', '0', '0', '0', '1'};

template <typename T>
void put_le(std::string& out, T v) {
    for (std::size_t i = 0; i < sizeof(T); ++i)
        out.push_back(static_cast<char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xff));
}

template <typename T>
T get_le(const std::string& in, std::size_t& pos) {
    if (pos + sizeof(T) > in.size()) throw DataError("truncated events.bin");
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i)
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
    pos += sizeof(T);
    return static_cast<T>(v);
}

}  // namespace

std::string save_dataset(const Dataset& dataset, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    std::string bin;
    bin.reserve(16 + dataset.events.size() * 20);
    bin.append(kEventsMagic, sizeof(kEventsMagic));
    put_le<std::uint64_t>(bin, dataset.events.size());
    for (const auto& e : dataset.events) {
        put_le<std::uint32_t>(bin, e.user);
        put_le<std::uint32_t>(bin, e.item);
        put_le<std::int64_t>(bin, e.ts);
        put_le<std::uint32_t>(bin, e.order);
    }
    write_file(dir / "events.bin", bin);

    json index;
    index["users"] = dataset.users;
    index["items"] = dataset.items;
    const std::string index_str = index.dump();
    write_file(dir / "index.json", index_str);

    const std::string hash = sha256_hex(sha256_hex(bin) + sha256_hex(index_str));
    json manifest;
    manifest["kind"] = "dataset";
    manifest["version"] = kVersion;
    manifest["users"] = dataset.num_users();
    manifest["items"] = dataset.num_items();
    manifest["interactions"] = dataset.events.size();
    manifest["content_hash"] = hash;
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    return hash;
}

Dataset load_dataset(const std::filesystem::path& dir) {
    const std::string bin = read_file(dir / "events.bin");
    if (bin.size() < 16 || std::memcmp(bin.data(), kEventsMagic, sizeof(kEventsMagic)) != 0)
        throw DataError("bad events.bin magic in " + dir.string());
    std::size_t pos = sizeof(kEventsMagic);
    const auto n = get_le<std::uint64_t>(bin, pos);

    Dataset ds;
    ds.events.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        Dataset::Event e;
        e.user = get_le<std::uint32_t>(bin, pos);
        e.item = get_le<std::uint32_t>(bin, pos);
        e.ts = get_le<std::int64_t>(bin, pos);
        e.order = get_le<std::uint32_t>(bin, pos);
        ds.events.push_back(e);
    }

    const json index = json::parse(read_file(dir / "index.json"));
    ds.users = index.at("users").get<std::vector<std::string>>();
    ds.items = index.at("items").get<std::vector<std::string>>();
    for (const auto& e : ds.events)
        if (e.user >= ds.users.size() || e.item == 0 || e.item > ds.items.size())
            throw DataError("event references unknown user/item in " + dir.string());
    return ds;
}

std::string dataset_content_hash(const std::filesystem::path& dir) {
    return sha256_hex(sha256_file(dir / "events.bin") + sha256_file(dir / "index.json"));
}

}  // namespace recdro
