#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>
#include <sstream>

#include "slpwq/reorder.hpp"

using namespace slpwq;

namespace {

std::map<int, long> counts_of(const std::vector<int>& w) {
    std::map<int, long> c;
    for (int x : w) ++c[x];
    return c;
}

bool reduced(const std::vector<int>& w) {
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
        if (w[i] == w[i + 1]) return false;
    return true;
}

// All reduced sequences over {0, ..., l-1} of length n, fed to `f`.
template <typename F>
void each_reduced(int l, int n, std::vector<int>& w, F&& f) {
    if (static_cast<int>(w.size()) == n) {
        f(w);
        return;
    }
    for (int x = 0; x < l; ++x) {
        if (!w.empty() && w.back() == x) continue;
        w.push_back(x);
        each_reduced(l, n, w, f);
        w.pop_back();
    }
}

std::string show(const std::vector<int>& w) {
    std::ostringstream os;
    for (int x : w) os << x << ' ';
    return os.str();
}

}  // namespace

TEST_CASE("reorder on alternating pairs") {
    ReorderedWord r = reorder({0, 1, 0, 1});
    REQUIRE(r.runs.size() == 1);
    REQUIRE(r.runs[0].x == 0);
    REQUIRE(r.runs[0].y == 1);
    REQUIRE(r.runs[0].exp == 2);
    REQUIRE(r.tail == -1);
    REQUIRE(r.expand() == std::vector<int>{0, 1, 0, 1});
}

TEST_CASE("reorder on three distinct letters") {
    ReorderedWord r = reorder({0, 1, 2});
    std::vector<int> out = r.expand();
    REQUIRE(reduced(out));
    REQUIRE(counts_of(out) == counts_of({0, 1, 2}));
    REQUIRE(out.front() == 0);
    REQUIRE(out.back() == 2);
}

TEST_CASE("reorder rejects bad input") {
    REQUIRE_THROWS_AS(reorder({}), Error);
    REQUIRE_THROWS_AS(reorder({0, 0}), Error);
    REQUIRE_THROWS_AS(reorder({0, 1, 1, 2}), Error);
}

TEST_CASE("reorder over all short reduced sequences") {
    for (int l = 1; l <= 4; ++l) {
        for (int n = 1; n <= 10; ++n) {
            std::vector<int> w;
            each_reduced(l, n, w, [&](const std::vector<int>& seq) {
                ReorderedWord r = reorder(seq);
                std::vector<int> out = r.expand();
                INFO("input " << show(seq) << " output " << show(out));

                // Same multiset of letters, reduced, same endpoints.
                REQUIRE(reduced(out));
                REQUIRE(counts_of(out) == counts_of(seq));
                REQUIRE(out.front() == seq.front());
                REQUIRE(out.back() == seq.back());

                // Run-length budget: one run per unordered letter pair.
                std::map<int, long> cnt = counts_of(seq);
                long ell = static_cast<long>(cnt.size());
                REQUIRE(static_cast<long>(r.runs.size()) <= std::max<long>(1, ell * (ell - 1) / 2));
                std::set<std::pair<int, int>> seen;
                for (const IndexRun& run : r.runs) {
                    REQUIRE(run.x != run.y);
                    REQUIRE(run.exp >= 1);
                    auto key = std::minmax(run.x, run.y);
                    REQUIRE(seen.insert({key.first, key.second}).second);
                }

                // Shape of the three cases of the rebuild.
                int a = seq.front(), c = seq.back();
                long na = cnt[a];
                if (ell >= 3 && 2 * na >= n) {
                    // Majority letter: every run starts with it.
                    for (const IndexRun& run : r.runs) REQUIRE((run.x == a || run.y == a));
                    if (n % 2 == 1) {
                        REQUIRE(r.tail == a);
                    } else {
                        REQUIRE(r.tail == -1);
                    }
                } else if (ell >= 3) {
                    REQUIRE(r.tail == (n % 2 == 1 ? c : -1));
                }
            });
        }
    }
}
