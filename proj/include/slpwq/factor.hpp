#ifndef SLPWQ_FACTOR_HPP
#define SLPWQ_FACTOR_HPP

#include "slpwq/slp.hpp"

namespace slpwq {

// Bottom-up factor test: for each variable X and plain word w, does w occur
// in eval(X)?  Per variable we keep the prefix and suffix of length up to
// max|w_i| plus one occurrence flag per pattern; crossing occurrences are
// detected in the window around each pair junction.
class FactorTable {
public:
    FactorTable(const Slp& slp, std::vector<Word> patterns)
        : slp_(slp), patterns_(std::move(patterns)) {
        window_ = 0;
        for (const Word& p : patterns_) window_ = std::max(window_, p.size());

        // A pattern occurs in eval(Xbar) iff its involution occurs in
        // eval(X), so the working pattern list is closed under involution.
        query_index_.resize(patterns_.size());
        for (std::size_t i = 0; i < patterns_.size(); ++i)
            query_index_[i] = intern(patterns_[i]);
        for (std::size_t i = 0; i < all_.size(); ++i)
            intern(slp_.alphabet().involution(all_[i]));  // close under involution
        bar_of_.resize(all_.size());
        for (std::size_t i = 0; i < all_.size(); ++i)
            bar_of_[i] = intern(slp_.alphabet().involution(all_[i]));

        int n = slp_.var_count();
        prefix_.resize(n + 1);
        suffix_.resize(n + 1);
        found_.assign(n + 1, std::vector<bool>(all_.size(), false));
        for (int x : slp_.topo_order()) compute(x);
    }

    // Does pattern i (as passed to the constructor) occur in eval(x)?
    bool occurs(Symbol x, std::size_t i) const {
        if (i >= patterns_.size()) throw Error(ErrorCode::OutOfRange, "pattern index");
        std::size_t k = query_index_[i];
        return positive(x) ? found_[x][k] : found_[-x][bar_of_[k]];
    }

private:
    std::size_t intern(const Word& w) {
        for (std::size_t i = 0; i < all_.size(); ++i)
            if (all_[i] == w) return i;
        all_.push_back(w);
        return all_.size() - 1;
    }

    static bool contains(const Word& hay, const Word& needle) {
        if (needle.empty()) return true;
        if (needle.size() > hay.size()) return false;
        return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
    }

    static Word take_front(Word w, std::size_t n) {
        if (w.size() > n) w.resize(n);
        return w;
    }

    static Word take_back(Word w, std::size_t n) {
        if (w.size() > n) w.erase(w.begin(), w.end() - static_cast<std::ptrdiff_t>(n));
        return w;
    }

    Word prefix_of(Symbol s) const {
        if (positive(s)) return prefix_[s];
        return take_front(slp_.alphabet().involution(suffix_[-s]), window_);
    }

    Word suffix_of(Symbol s) const {
        if (positive(s)) return suffix_[s];
        return take_back(slp_.alphabet().involution(prefix_[-s]), window_);
    }

    bool flag_of(Symbol s, std::size_t k) const {
        return positive(s) ? found_[s][k] : found_[-s][bar_of_[k]];
    }

    void compute(int x) {
        const Rule& r = slp_.rule(x);
        if (r.kind == Rule::Terminal) {
            Word w;
            if (r.letter >= 0) w.push_back(r.letter);
            prefix_[x] = take_front(w, window_);
            suffix_[x] = prefix_[x];
            for (std::size_t k = 0; k < all_.size(); ++k)
                found_[x][k] = contains(w, all_[k]);
            return;
        }
        Word left_sfx = suffix_of(r.left);
        Word right_pfx = prefix_of(r.right);
        Word junction = left_sfx;
        junction.insert(junction.end(), right_pfx.begin(), right_pfx.end());
        for (std::size_t k = 0; k < all_.size(); ++k)
            found_[x][k] =
                flag_of(r.left, k) || flag_of(r.right, k) || contains(junction, all_[k]);

        Word pfx = prefix_of(r.left);
        if (slp_.length(r.left) < BigInt(window_)) {
            Word more = prefix_of(r.right);
            pfx.insert(pfx.end(), more.begin(), more.end());
        }
        prefix_[x] = take_front(std::move(pfx), window_);

        Word sfx = suffix_of(r.right);
        if (slp_.length(r.right) < BigInt(window_)) {
            Word more = suffix_of(r.left);
            more.insert(more.end(), sfx.begin(), sfx.end());
            sfx = std::move(more);
        }
        suffix_[x] = take_back(std::move(sfx), window_);
    }

    const Slp& slp_;
    std::vector<Word> patterns_;
    std::vector<Word> all_;                  // closed under involution
    std::vector<std::size_t> bar_of_;        // involution on all_
    std::vector<std::size_t> query_index_;   // patterns_ -> all_
    std::size_t window_;
    std::vector<Word> prefix_;               // indexed by positive variable
    std::vector<Word> suffix_;
    std::vector<std::vector<bool>> found_;
};

inline FactorTable factor_occurs(const Slp& slp, std::vector<Word> patterns) {
    return FactorTable(slp, std::move(patterns));
}

}  // namespace slpwq

#endif
