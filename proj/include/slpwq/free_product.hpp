#ifndef SLPWQ_FREE_PRODUCT_HPP
#define SLPWQ_FREE_PRODUCT_HPP

#include <map>

#include "slpwq/build.hpp"

namespace slpwq {

// One finitely generated abelian factor Z^rank + Z/d1 + ... + Z/ds.
// Elements are coordinate vectors, torsion coordinates reduced mod di.
struct AbelianFactor {
    int rank = 0;
    std::vector<long> torsion;

    int dims() const { return rank + static_cast<int>(torsion.size()); }
};

using Element = std::vector<BigInt>;

struct Block {
    int alpha;
    Element g;

    bool operator==(const Block& o) const { return alpha == o.alpha && g == o.g; }
    bool operator<(const Block& o) const {
        return alpha != o.alpha ? alpha < o.alpha : g < o.g;
    }
};

// A word over the (infinite) block alphabet Delta; reduced iff consecutive
// blocks have distinct factors and no block is the identity.
using DeltaWord = std::vector<Block>;

// The free product of finitely many abelian factors, with the generator
// alphabet Gamma: one letter (plus inverse) per coordinate of each factor.
// The first generator of each factor is its distinguished letter.
class FreeProductSpec {
public:
    int add_factor(const std::string& name, AbelianFactor f) {
        if (f.rank < 0) throw Error(ErrorCode::PreconditionViolated, "negative rank");
        for (long d : f.torsion)
            if (d < 2) throw Error(ErrorCode::PreconditionViolated, "torsion modulus < 2");
        if (f.dims() == 0)
            throw Error(ErrorCode::PreconditionViolated, "trivial factor: " + name);
        for (const auto& n : names_)
            if (n == name) throw Error(ErrorCode::DuplicateLhs, "factor declared twice: " + name);
        int alpha = static_cast<int>(names_.size());
        names_.push_back(name);
        factors_.push_back(std::move(f));
        const AbelianFactor& fac = factors_.back();
        for (int j = 0; j < fac.dims(); ++j) {
            std::string base = (j == 0) ? name : name + std::to_string(j + 1);
            bool order2 = (j >= fac.rank && fac.torsion[j - fac.rank] == 2);
            gamma_.add_pair(base, order2 ? base : base + "-");
            letter_coord_.push_back({alpha, j, false});
            if (!order2) letter_coord_.push_back({alpha, j, true});
        }
        return alpha;
    }

    std::size_t size() const { return names_.size(); }
    const std::string& name(int alpha) const { return names_.at(alpha); }
    const AbelianFactor& factor(int alpha) const { return factors_.at(alpha); }
    const InvolutiveAlphabet& gamma() const { return gamma_; }

    int index(const std::string& name) const {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == name) return static_cast<int>(i);
        throw Error(ErrorCode::UnknownSymbol, "unknown factor: " + name);
    }

    Element identity(int alpha) const { return Element(factors_.at(alpha).dims(), 0); }

    Element normalize(int alpha, Element e) const {
        const AbelianFactor& f = factors_.at(alpha);
        if (static_cast<int>(e.size()) != f.dims())
            throw Error(ErrorCode::PreconditionViolated, "element dimension mismatch");
        for (std::size_t j = f.rank; j < e.size(); ++j) {
            long d = f.torsion[j - f.rank];
            e[j] %= d;
            if (e[j] < 0) e[j] += d;
        }
        return e;
    }

    bool is_identity(int alpha, const Element& e) const {
        for (const BigInt& c : normalize(alpha, e))
            if (c != 0) return false;
        return true;
    }

    Element mul(int alpha, const Element& a, const Element& b) const {
        Element out(a);
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += b.at(j);
        return normalize(alpha, std::move(out));
    }

    Element inv(int alpha, const Element& e) const {
        Element out(e);
        for (BigInt& c : out) c = -c;
        return normalize(alpha, std::move(out));
    }

    Element unit(int alpha, int coord, const BigInt& value = 1) const {
        Element e = identity(alpha);
        e.at(coord) = value;
        return normalize(alpha, std::move(e));
    }

    // The Gamma letter for the +/- unit of one coordinate.
    Letter gamma_letter(int alpha, int coord, bool inverse = false) const {
        const std::string& base = (coord == 0) ? names_.at(alpha)
                                               : names_.at(alpha) + std::to_string(coord + 1);
        Letter l = gamma_.id(base);
        return inverse ? gamma_.bar(l) : l;
    }

    // The distinguished letter of the index alpha.
    Letter distinguished(int alpha) const { return gamma_letter(alpha, 0); }

    Block block_of_letter(Letter l) const {
        const auto& lc = letter_coord_.at(l);
        return Block{lc.alpha, unit(lc.alpha, lc.coord, lc.inverse ? -1 : 1)};
    }

    Block inv(const Block& b) const { return Block{b.alpha, inv(b.alpha, b.g)}; }

    DeltaWord involution(const DeltaWord& w) const {
        DeltaWord out;
        for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(inv(*it));
        return out;
    }

    bool is_reduced(const DeltaWord& w) const {
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (is_identity(w[i].alpha, w[i].g)) return false;
            if (i + 1 < w.size() && w[i].alpha == w[i + 1].alpha) return false;
        }
        return true;
    }

    // Normal form: merge same-factor neighbours, drop trivial blocks, with
    // cascading.
    DeltaWord reduce(const DeltaWord& w) const {
        DeltaWord stack;
        for (const Block& b : w) {
            Block cur{b.alpha, normalize(b.alpha, b.g)};
            for (;;) {
                if (is_identity(cur.alpha, cur.g)) break;
                if (stack.empty() || stack.back().alpha != cur.alpha) {
                    stack.push_back(std::move(cur));
                    break;
                }
                cur.g = mul(cur.alpha, stack.back().g, cur.g);
                stack.pop_back();
            }
        }
        return stack;
    }

    DeltaWord blocks_of_gamma_word(const Word& w) const {
        DeltaWord raw;
        for (Letter l : w) raw.push_back(block_of_letter(l));
        return reduce(raw);
    }

    // A Gamma-spelling of one group element: per coordinate, the generator
    // repeated |value| times (torsion values reduced to the shorter side).
    Word spell(int alpha, const Element& e) const {
        Element n = normalize(alpha, e);
        const AbelianFactor& f = factors_.at(alpha);
        Word out;
        for (int j = 0; j < f.dims(); ++j) {
            BigInt v = n[j];
            if (j >= f.rank) {
                long d = f.torsion[j - f.rank];
                if (v > d / 2) v -= d;  // spell the inverse side when shorter
            }
            bool neg = v < 0;
            if (neg) v = -v;
            Letter l = gamma_letter(alpha, j, neg);
            for (BigInt i = 0; i < v; ++i) out.push_back(l);
        }
        return out;
    }

    Word spell(const DeltaWord& w) const {
        Word out;
        for (const Block& b : w) {
            Word part = spell(b.alpha, b.g);
            out.insert(out.end(), part.begin(), part.end());
        }
        return out;
    }

private:
    struct LetterCoord {
        int alpha, coord;
        bool inverse;
    };

    std::vector<std::string> names_;
    std::vector<AbelianFactor> factors_;
    InvolutiveAlphabet gamma_;
    std::vector<LetterCoord> letter_coord_;
};

// The extended Parikh image: per-factor block counts, per-factor abelian
// images, and the first/last block factors (-1 for the empty word).
struct ExtendedParikhImage {
    std::vector<BigInt> counts;
    std::vector<Element> abelian;
    int first = -1, last = -1;

    bool operator==(const ExtendedParikhImage& o) const {
        return counts == o.counts && abelian == o.abelian && first == o.first && last == o.last;
    }
};

inline ExtendedParikhImage parikh_of_word(const FreeProductSpec& spec, const DeltaWord& w) {
    DeltaWord nf = spec.reduce(w);
    ExtendedParikhImage pi;
    pi.counts.assign(spec.size(), 0);
    for (std::size_t a = 0; a < spec.size(); ++a)
        pi.abelian.push_back(spec.identity(static_cast<int>(a)));
    for (const Block& b : nf) {
        pi.counts[b.alpha] += 1;
        pi.abelian[b.alpha] = spec.mul(b.alpha, pi.abelian[b.alpha], b.g);
    }
    if (!nf.empty()) {
        pi.first = nf.front().alpha;
        pi.last = nf.back().alpha;
    }
    return pi;
}

inline ExtendedParikhImage parikh_of_word(const FreeProductSpec& spec, const Word& w) {
    return parikh_of_word(spec, spec.blocks_of_gamma_word(w));
}

// Normal form of uv in the free product.
inline DeltaWord reduce_product(const FreeProductSpec& spec, const DeltaWord& u,
                                const DeltaWord& v) {
    DeltaWord uv(u);
    uv.insert(uv.end(), v.begin(), v.end());
    return spec.reduce(uv);
}

namespace detail {

// Bottom-up data for one symbol of a Gamma-SLP whose evaluation is a reduced
// Delta-word: block counts per factor, abelian images, and the two boundary
// blocks.  `reduced` goes false at the first junction whose boundary blocks
// share a factor and multiply to the identity.
struct BlockData {
    bool reduced = true;
    BigInt blocks = 0;
    std::vector<BigInt> counts;
    std::vector<Element> abelian;
    Block first{-1, {}}, last{-1, {}};
};

class BlockAnalysis {
public:
    BlockAnalysis(const FreeProductSpec& spec, const Slp& slp) : spec_(spec), slp_(slp) {
        // Letters are matched by name so the SLP may carry its own copy of
        // the generator alphabet.
        for (Letter l = 0; l < static_cast<Letter>(slp.alphabet().size()); ++l)
            letter_block_.push_back(spec.block_of_letter(spec.gamma().id(slp.alphabet().name(l))));
    }

    BlockData of(Symbol x) {
        BlockData d = of_positive(var_of(x));
        return positive(x) ? d : flipped(d);
    }

private:
    BlockData empty_data() const {
        BlockData d;
        d.counts.assign(spec_.size(), 0);
        for (std::size_t a = 0; a < spec_.size(); ++a)
            d.abelian.push_back(spec_.identity(static_cast<int>(a)));
        return d;
    }

    BlockData flipped(const BlockData& d) const {
        BlockData o(d);
        std::swap(o.first, o.last);
        if (o.first.alpha >= 0) o.first.g = spec_.inv(o.first.alpha, o.first.g);
        if (o.last.alpha >= 0) o.last.g = spec_.inv(o.last.alpha, o.last.g);
        for (std::size_t a = 0; a < o.abelian.size(); ++a)
            o.abelian[a] = spec_.inv(static_cast<int>(a), o.abelian[a]);
        return o;
    }

    const BlockData& of_positive(int x) {
        auto it = memo_.find(x);
        if (it != memo_.end()) return it->second;
        const Rule& r = slp_.rule(x);
        BlockData d = empty_data();
        if (r.kind == Rule::Terminal) {
            if (r.letter >= 0) {
                const Block& b = letter_block_.at(r.letter);
                d.blocks = 1;
                d.counts[b.alpha] = 1;
                d.abelian[b.alpha] = b.g;
                d.first = d.last = b;
            }
        } else {
            BlockData y = of(r.left);
            BlockData z = of(r.right);
            d.reduced = y.reduced && z.reduced;
            d.blocks = y.blocks + z.blocks;
            for (std::size_t a = 0; a < spec_.size(); ++a) {
                d.counts[a] = y.counts[a] + z.counts[a];
                d.abelian[a] = spec_.mul(static_cast<int>(a), y.abelian[a], z.abelian[a]);
            }
            if (y.blocks == 0) {
                d.first = z.first;
                d.last = z.last;
            } else if (z.blocks == 0) {
                d.first = y.first;
                d.last = y.last;
            } else if (y.last.alpha == z.first.alpha) {
                int a = y.last.alpha;
                Element g = spec_.mul(a, y.last.g, z.first.g);
                if (spec_.is_identity(a, g)) {
                    // A vanishing junction block would cascade; the
                    // evaluation is not reduced.
                    d.reduced = false;
                    d.first = y.first;
                    d.last = z.last;
                } else {
                    d.blocks -= 1;
                    d.counts[a] -= 1;
                    d.first = (y.blocks == 1) ? Block{a, g} : y.first;
                    d.last = (z.blocks == 1) ? Block{a, g} : z.last;
                }
            } else {
                d.first = y.first;
                d.last = z.last;
            }
        }
        return memo_.emplace(x, std::move(d)).first->second;
    }

    const FreeProductSpec& spec_;
    const Slp& slp_;
    std::vector<Block> letter_block_;
    std::map<int, BlockData> memo_;
};

}  // namespace detail

inline bool is_reduced_slp(const FreeProductSpec& spec, const Slp& slp, Symbol x) {
    return detail::BlockAnalysis(spec, slp).of(x).reduced;
}

// pi(eval(x)) without decompression; eval(x) must be a reduced Delta-word.
inline ExtendedParikhImage parikh_of_slp(const FreeProductSpec& spec, const Slp& slp, Symbol x) {
    detail::BlockData d = detail::BlockAnalysis(spec, slp).of(x);
    if (!d.reduced)
        throw Error(ErrorCode::NotReduced, "evaluation is not a reduced word");
    ExtendedParikhImage pi;
    pi.counts = std::move(d.counts);
    pi.abelian = std::move(d.abelian);
    pi.first = d.first.alpha;
    pi.last = d.last.alpha;
    return pi;
}

}  // namespace slpwq

#endif
