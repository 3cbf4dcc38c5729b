#include "crowder/two_tiered.hpp"

#include "crowder/errors.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>
#include <unordered_map>

namespace crowder {

namespace {

using Counts = std::vector<std::uint64_t>;
using Vec = std::vector<std::uint32_t>;

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b)
{
    return (a + b - 1) / b;
}

// max of the volume bound and the Martello-Toth L2 bound
std::uint64_t lower_bound(const Counts& c, std::size_t k)
{
    std::uint64_t volume = 0;
    for (std::size_t j = 1; j <= k; ++j)
        volume += j * c[j - 1];
    std::uint64_t best = ceil_div(volume, k);

    for (std::size_t alpha = 0; 2 * alpha <= k; ++alpha) {
        std::uint64_t n1 = 0, n2 = 0, s2 = 0, s3 = 0;
        for (std::size_t j = 1; j <= k; ++j) {
            const std::uint64_t cj = c[j - 1];
            if (cj == 0)
                continue;
            if (j > k - alpha)
                n1 += cj;
            else if (2 * j > k) {
                n2 += cj;
                s2 += j * cj;
            } else if (j >= alpha)
                s3 += j * cj;
        }
        const std::uint64_t free_in_j2 = n2 * k - s2;
        const std::uint64_t extra = s3 > free_in_j2 ? ceil_div(s3 - free_in_j2, k) : 0;
        best = std::max(best, n1 + n2 + extra);
    }
    return best;
}

std::vector<Vec> first_fit_decreasing(const Counts& c, std::size_t k)
{
    std::vector<Vec> bins;
    std::vector<std::uint64_t> loads;
    for (std::size_t j = k; j >= 1; --j) {
        // bins before `first` are known to have no room for size j
        std::size_t first = 0;
        for (std::uint64_t n = 0; n < c[j - 1]; ++n) {
            while (first < bins.size() && loads[first] + j > k)
                ++first;
            std::size_t b = first;
            while (b < bins.size() && loads[b] + j > k)
                ++b;
            if (b == bins.size()) {
                bins.emplace_back(k, 0);
                loads.push_back(0);
            }
            ++bins[b][j - 1];
            loads[b] += j;
        }
    }
    return bins;
}

struct CountsHash {
    std::size_t operator()(const Counts& c) const
    {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (auto x : c) {
            h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h *= 0x100000001b3ULL;
        }
        return static_cast<std::size_t>(h);
    }
};

class Search {
public:
    Search(std::size_t k, const PackingOptions& options, std::vector<Vec> incumbent)
        : k_(k), options_(options), best_(std::move(incumbent))
    {
    }

    void run(Counts& remaining, std::uint64_t root_bound)
    {
        root_bound_ = root_bound;
        dfs(remaining);
    }

    const std::vector<Vec>& best() const { return best_; }
    std::uint64_t nodes() const { return nodes_; }
    bool aborted() const { return aborted_; }

private:
    void dfs(Counts& r)
    {
        if (done())
            return;
        if (++nodes_ > options_.node_limit) {
            aborted_ = true;
            return;
        }

        std::size_t largest = 0;
        for (std::size_t j = k_; j >= 1; --j)
            if (r[j - 1] > 0) {
                largest = j;
                break;
            }
        if (largest == 0) {
            if (path_.size() < best_.size())
                best_ = path_;
            return;
        }

        const std::uint64_t depth = path_.size();
        if (depth + lower_bound(r, k_) >= best_.size())
            return;
        auto [it, inserted] = seen_.try_emplace(r, depth);
        if (!inserted) {
            if (it->second <= depth)
                return;
            it->second = depth;
        }

        std::vector<Vec> branches;
        Vec a(k_, 0);
        maximal_patterns(r, largest, largest, k_, a, branches);
        std::stable_sort(branches.begin(), branches.end(), [&](const Vec& x, const Vec& y) {
            return load(x) > load(y);
        });

        for (const auto& p : branches) {
            for (std::size_t j = 0; j < k_; ++j)
                r[j] -= p[j];
            path_.push_back(p);
            dfs(r);
            path_.pop_back();
            for (std::size_t j = 0; j < k_; ++j)
                r[j] += p[j];
            if (done())
                return;
        }
    }

    // patterns that contain at least one item of size `largest` and leave no
    // remaining item that would still fit
    void maximal_patterns(const Counts& r, std::size_t largest, std::size_t j, std::size_t cap, Vec& a,
                          std::vector<Vec>& out) const
    {
        if (j == 0) {
            for (std::size_t s = 1; s <= cap && s <= k_; ++s)
                if (r[s - 1] > a[s - 1])
                    return;
            out.push_back(a);
            return;
        }
        const std::uint64_t most = std::min<std::uint64_t>(r[j - 1], cap / j);
        const std::uint64_t least = j == largest ? 1 : 0;
        for (std::uint64_t n = most + 1; n-- > least;) {
            a[j - 1] = static_cast<std::uint32_t>(n);
            maximal_patterns(r, largest, j - 1, cap - n * j, a, out);
        }
        a[j - 1] = 0;
    }

    std::uint64_t load(const Vec& a) const
    {
        std::uint64_t s = 0;
        for (std::size_t j = 1; j <= k_; ++j)
            s += j * a[j - 1];
        return s;
    }

    bool done() const { return aborted_ || best_.size() <= root_bound_; }

    std::size_t k_;
    PackingOptions options_;
    std::vector<Vec> best_;
    std::vector<Vec> path_;
    std::unordered_map<Counts, std::uint64_t, CountsHash> seen_;
    std::uint64_t root_bound_ = 0;
    std::uint64_t nodes_ = 0;
    bool aborted_ = false;
};

}  // namespace

PackingInstance PackingInstance::from_sizes(std::span<const std::size_t> sizes, std::size_t k)
{
    if (k < 1)
        throw ConfigError("bin capacity must be positive");
    PackingInstance inst;
    inst.k = k;
    inst.counts.assign(k, 0);
    for (auto s : sizes) {
        if (s < 1 || s > k)
            throw std::invalid_argument("item size " + std::to_string(s) + " outside [1, " + std::to_string(k) + "]");
        ++inst.counts[s - 1];
    }
    return inst;
}

std::uint64_t PackingInstance::item_count() const
{
    std::uint64_t n = 0;
    for (auto c : counts)
        n += c;
    return n;
}

std::uint64_t PackingInstance::volume() const
{
    std::uint64_t v = 0;
    for (std::size_t j = 1; j <= counts.size(); ++j)
        v += j * counts[j - 1];
    return v;
}

std::uint64_t Pattern::load() const
{
    std::uint64_t s = 0;
    for (std::size_t j = 1; j <= a.size(); ++j)
        s += j * a[j - 1];
    return s;
}

std::vector<Pattern> enumerate_patterns(const PackingInstance& instance)
{
    const std::size_t k = instance.k;
    if (k < 2)
        throw ConfigError("cluster size k must be at least 2");
    if (instance.counts.size() != k)
        throw std::invalid_argument("instance.counts must have k entries");

    std::vector<Pattern> out;
    Vec a(k, 0);
    // descending counts from size k down to 1 yields the documented order
    auto rec = [&](auto&& self, std::size_t j, std::uint64_t cap) -> void {
        if (j == 0) {
            if (std::any_of(a.begin(), a.end(), [](auto x) { return x != 0; }))
                out.push_back(Pattern{a});
            return;
        }
        const std::uint64_t most = std::min<std::uint64_t>(instance.counts[j - 1], cap / j);
        for (std::uint64_t n = most + 1; n-- > 0;) {
            a[j - 1] = static_cast<std::uint32_t>(n);
            self(self, j - 1, cap - n * j);
        }
        a[j - 1] = 0;
    };
    rec(rec, k, k);
    return out;
}

PackingSolution solve_packing(const PackingInstance& instance, const PackingOptions& options)
{
    const std::size_t k = instance.k;
    PackingSolution sol;
    sol.patterns = enumerate_patterns(instance);
    sol.multiplicity.assign(sol.patterns.size(), 0);

    Counts remaining = instance.counts;
    sol.lower_bound = lower_bound(remaining, k);

    std::vector<Vec> bins = first_fit_decreasing(remaining, k);
    sol.proven_optimal = true;
    if (bins.size() > sol.lower_bound) {
        Search search(k, options, std::move(bins));
        search.run(remaining, sol.lower_bound);
        bins = search.best();
        sol.nodes = search.nodes();
        sol.proven_optimal = !search.aborted() || bins.size() == sol.lower_bound;
    }

    std::map<Vec, std::size_t> index;
    for (std::size_t i = 0; i < sol.patterns.size(); ++i)
        index.emplace(sol.patterns[i].a, i);
    for (const auto& b : bins) {
        auto it = index.find(b);
        if (it == index.end())
            throw std::logic_error("packing produced a pattern outside the enumerated set");
        sol.bins.push_back(it->second);
        ++sol.multiplicity[it->second];
    }
    sol.objective = sol.bins.size();
    return sol;
}

std::vector<std::vector<std::size_t>> assign_items(const PackingSolution& solution,
                                                    std::span<const std::size_t> item_sizes)
{
    std::map<std::size_t, std::deque<std::size_t>> by_size;
    for (std::size_t i = 0; i < item_sizes.size(); ++i)
        by_size[item_sizes[i]].push_back(i);

    std::vector<std::vector<std::size_t>> out;
    for (auto p : solution.bins) {
        const auto& a = solution.patterns[p].a;
        std::vector<std::size_t> bin;
        for (std::size_t j = a.size(); j >= 1; --j) {
            auto& queue = by_size[j];
            for (std::uint32_t n = 0; n < a[j - 1] && !queue.empty(); ++n) {
                bin.push_back(queue.front());
                queue.pop_front();
            }
        }
        if (!bin.empty())
            out.push_back(std::move(bin));
    }
    for (const auto& [size, queue] : by_size)
        if (!queue.empty())
            throw std::logic_error("packing solution leaves items of size " + std::to_string(size) + " unassigned");
    return out;
}

}  // namespace crowder
