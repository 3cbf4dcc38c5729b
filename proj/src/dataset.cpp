#include "crowder/dataset.hpp"

#include "crowder/csv.hpp"
#include "crowder/errors.hpp"
#include "crowder/rng.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace crowder {

namespace {

bool is_alnum(unsigned char c)
{
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

std::vector<std::string> split_ws(std::string_view s)
{
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && s[i] == ' ')
            ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ')
            ++j;
        if (j > i)
            out.emplace_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

TokenSet to_set(std::vector<std::string> tokens)
{
    std::sort(tokens.begin(), tokens.end());
    tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
    return tokens;
}

}  // namespace

std::string normalize_text(std::string_view text)
{
    std::string out(text);
    for (char& c : out) {
        auto u = static_cast<unsigned char>(c);
        if (!is_alnum(u))
            c = ' ';
        else if (u >= 'A' && u <= 'Z')
            c = static_cast<char>(u - 'A' + 'a');
    }
    return out;
}

TokenSet tokenize(std::string_view text)
{
    return to_set(split_ws(normalize_text(text)));
}

Record normalize_record(RecordId id, Source source,
                        std::vector<std::pair<std::string, std::string>> attributes)
{
    Record r;
    r.id = std::move(id);
    r.source = source;
    r.attributes = std::move(attributes);
    r.tokens = tokens_of(r, {});
    return r;
}

TokenSet tokens_of(const Record& r, const std::vector<std::string>& names)
{
    std::string joined;
    for (const auto& [key, value] : r.attributes) {
        if (!names.empty() && std::find(names.begin(), names.end(), key) == names.end())
            continue;
        joined += value;
        joined += ' ';
    }
    return tokenize(joined);
}

std::vector<Record> parse_records(std::istream& in, JoinMode mode)
{
    auto rows = csv::parse(in);
    if (rows.empty())
        throw SchemaError("records file has no header row");

    const csv::Row& header = rows.front();
    std::ptrdiff_t id_col = -1, source_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "id")
            id_col = static_cast<std::ptrdiff_t>(i);
        else if (header[i] == "source")
            source_col = static_cast<std::ptrdiff_t>(i);
    }
    if (id_col < 0)
        throw SchemaError("records file has no `id` column");
    if (mode == JoinMode::Cross && source_col < 0)
        throw SchemaError("cross mode requires a `source` column");

    std::vector<Record> records;
    records.reserve(rows.size() - 1);
    std::unordered_set<std::string> seen;
    std::vector<std::string> sources;

    for (std::size_t line = 1; line < rows.size(); ++line) {
        const csv::Row& row = rows[line];
        if (row.size() != header.size())
            throw SchemaError("row " + std::to_string(line + 1) + " has " + std::to_string(row.size()) +
                              " fields, header has " + std::to_string(header.size()));
        const std::string& id = row[static_cast<std::size_t>(id_col)];
        if (id.empty())
            throw SchemaError("row " + std::to_string(line + 1) + " has an empty id");
        if (!seen.insert(id).second)
            throw SchemaError("duplicate record id '" + id + "'");

        Source source = Source::Single;
        if (mode == JoinMode::Cross) {
            const std::string& tag = row[static_cast<std::size_t>(source_col)];
            auto it = std::find(sources.begin(), sources.end(), tag);
            if (it == sources.end()) {
                if (sources.size() == 2)
                    throw SchemaError("`source` column has more than two distinct values (third: '" + tag + "')");
                sources.push_back(tag);
                it = sources.end() - 1;
            }
            source = it == sources.begin() ? Source::A : Source::B;
        }

        std::vector<std::pair<std::string, std::string>> attrs;
        for (std::size_t c = 0; c < header.size(); ++c)
            if (static_cast<std::ptrdiff_t>(c) != id_col && static_cast<std::ptrdiff_t>(c) != source_col)
                attrs.emplace_back(header[c], row[c]);
        records.push_back(normalize_record(id, source, std::move(attrs)));
    }

    if (mode == JoinMode::Cross && !records.empty() && sources.size() != 2)
        throw SchemaError("cross mode requires exactly two distinct `source` values");
    return records;
}

std::vector<Record> load_records(const std::string& path, JoinMode mode)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw SchemaError("cannot open records file " + path);
    return parse_records(in, mode);
}

GroundTruth load_truth(const std::string& path)
{
    auto rows = csv::read_file(path);
    if (rows.empty())
        throw SchemaError("truth file " + path + " has no header row");
    const csv::Row& header = rows.front();
    auto col = [&](const char* name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
            throw SchemaError("truth file " + path + " lacks column `" + name + "`");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t ca = col("id_a"), cb = col("id_b");

    GroundTruth truth;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& row = rows[i];
        if (row.size() != header.size())
            throw SchemaError("truth row " + std::to_string(i + 1) + " has wrong field count");
        if (row[ca] == row[cb])
            throw SchemaError("truth contains self pair (" + row[ca] + ", " + row[ca] + ")");
        truth.matches.emplace(row[ca], row[cb]);
    }
    return truth;
}

void validate_truth(const GroundTruth& truth, const std::vector<Record>& records)
{
    std::unordered_set<std::string> ids;
    for (const auto& r : records)
        ids.insert(r.id);
    for (const auto& p : truth.matches)
        for (const auto* id : {&p.a, &p.b})
            if (!ids.count(*id))
                throw SchemaError("truth references unknown record '" + *id + "'");
}

DatasetStats compute_stats(const std::vector<Record>& records, JoinMode mode, const GroundTruth* truth)
{
    DatasetStats s;
    s.record_count = records.size();
    if (mode == JoinMode::Self) {
        s.total_pairs = s.record_count * (s.record_count ? s.record_count - 1 : 0) / 2;
    } else {
        std::uint64_t na = 0, nb = 0;
        for (const auto& r : records)
            (r.source == Source::A ? na : nb) += 1;
        s.total_pairs = na * nb;
    }
    if (truth)
        s.match_count = truth->size();
    return s;
}

void write_records(std::ostream& out, const std::vector<Record>& records, bool with_source)
{
    csv::Row header{"id"};
    if (with_source)
        header.push_back("source");
    if (!records.empty())
        for (const auto& kv : records.front().attributes)
            header.push_back(kv.first);
    csv::write_row(out, header);
    for (const auto& r : records) {
        csv::Row row{r.id};
        if (with_source)
            row.push_back(r.source == Source::A ? "A" : r.source == Source::B ? "B" : "single");
        for (const auto& kv : r.attributes)
            row.push_back(kv.second);
        csv::write_row(out, row);
    }
}

void write_truth(std::ostream& out, const GroundTruth& truth)
{
    csv::write_row(out, {"id_a", "id_b"});
    for (const auto& p : truth.matches)
        csv::write_row(out, {p.a, p.b});
}

DupDataset synthesize_dup_dataset(const std::vector<Record>& base, unsigned max_dups, std::uint64_t seed,
                                  const std::string& name_attribute)
{
    DupDataset out;
    Rng rng(seed);

    std::unordered_set<std::string> ids;
    for (const auto& r : base)
        ids.insert(r.id);

    for (const auto& rec : base) {
        out.records.push_back(rec);
        const auto copies = static_cast<unsigned>(rng.below(std::uint64_t{max_dups} + 1));
        if (copies == 0)
            continue;

        std::size_t name_index = 0;
        for (std::size_t i = 0; i < rec.attributes.size(); ++i)
            if (rec.attributes[i].first == name_attribute) {
                name_index = i;
                break;
            }

        std::vector<RecordId> group{rec.id};
        for (unsigned c = 1; c <= copies; ++c) {
            auto attrs = rec.attributes;
            if (!attrs.empty()) {
                auto words = split_ws(normalize_text(attrs[name_index].second));
                if (words.size() >= 2) {
                    auto i = rng.below(words.size());
                    auto j = rng.below(words.size() - 1);
                    if (j >= i)
                        ++j;
                    std::swap(words[i], words[j]);
                    std::string joined;
                    for (const auto& w : words)
                        joined += (joined.empty() ? "" : " ") + w;
                    attrs[name_index].second = std::move(joined);
                } else {
                    ++out.unchanged_duplicates;
                }
            } else {
                ++out.unchanged_duplicates;
            }

            RecordId id = rec.id + "_d" + std::to_string(c);
            if (!ids.insert(id).second)
                throw SchemaError("synthesized id '" + id + "' collides with an existing record");
            out.records.push_back(normalize_record(id, rec.source, std::move(attrs)));
            group.push_back(std::move(id));
        }
        for (std::size_t i = 0; i < group.size(); ++i)
            for (std::size_t j = i + 1; j < group.size(); ++j)
                out.truth.matches.emplace(group[i], group[j]);
    }
    return out;
}

}  // namespace crowder
