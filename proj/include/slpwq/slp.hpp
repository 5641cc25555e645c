#ifndef SLPWQ_SLP_HPP
#define SLPWQ_SLP_HPP

#include <cassert>
#include <optional>
#include <utility>

#include "slpwq/alphabet.hpp"
#include "slpwq/bigint.hpp"

namespace slpwq {

constexpr std::uint64_t kDefaultEvalCap = std::uint64_t(1) << 26;

// One rule per positive variable: X -> a (letter == -1 encodes the empty
// word) or X -> Y Z with Y, Z arbitrary symbols.
struct Rule {
    enum Kind { Terminal, Pair };
    Kind kind = Terminal;
    Letter letter = -1;  // Terminal only; -1 = empty word
    Symbol left = 0, right = 0;

    static Rule terminal(Letter a) { return Rule{Terminal, a, 0, 0}; }
    static Rule empty() { return Rule{Terminal, -1, 0, 0}; }
    static Rule pair(Symbol y, Symbol z) { return Rule{Pair, -1, y, z}; }
};

// A validated straight-line program.  Immutable; queries are pure and safe
// to run concurrently on a shared instance.
class Slp {
public:
    Slp(InvolutiveAlphabet alphabet, VariableSet variables, std::vector<Rule> rules)
        : alphabet_(std::move(alphabet)), variables_(std::move(variables)), rules_(std::move(rules)) {
        validate();
    }

    const InvolutiveAlphabet& alphabet() const { return alphabet_; }
    const VariableSet& variables() const { return variables_; }
    int var_count() const { return variables_.count(); }

    const Rule& rule(int x) const { return rules_.at(x - 1); }

    // The rule for an arbitrary symbol, with the dual rule
    // Xbar -> Zbar Ybar synthesized on the fly.
    Rule rule_of(Symbol s) const {
        const Rule& r = rules_.at(var_of(s) - 1);
        if (positive(s)) return r;
        if (r.kind == Rule::Terminal)
            return r.letter < 0 ? Rule::empty() : Rule::terminal(alphabet_.bar(r.letter));
        return Rule::pair(bar(r.right), bar(r.left));
    }

    const BigInt& length(Symbol s) const { return lengths_.at(var_of(s) - 1); }
    int height(Symbol s) const { return heights_.at(var_of(s) - 1); }

    // Positive variables in dependency order (children before parents).
    const std::vector<int>& topo_order() const { return topo_; }

    // Total rule count ||S||.
    std::size_t size() const { return rules_.size(); }

    Word eval(Symbol x, std::uint64_t cap = kDefaultEvalCap) const {
        if (length(x) > cap)
            throw Error(ErrorCode::CapExceeded,
                        "eval of " + variables_.symbol_name(x) + " exceeds cap");
        Word out;
        out.reserve(static_cast<std::size_t>(to_long(length(x))));
        append_eval(x, out);
        return out;
    }

    // eval(x)[alpha, beta] without materializing eval(x).
    Word extract(Symbol x, const BigInt& alpha, const BigInt& beta,
                 std::uint64_t cap = kDefaultEvalCap) const {
        if (alpha < 0 || alpha > beta || beta > length(x))
            throw Error(ErrorCode::OutOfRange, "extract interval out of range");
        if (beta - alpha > cap) throw Error(ErrorCode::CapExceeded, "extract exceeds cap");
        Word out;
        out.reserve(static_cast<std::size_t>(to_long(beta - alpha)));
        extract_into(x, alpha, beta, out);
        return out;
    }

    Letter letter_at(Symbol x, BigInt pos) const {
        if (pos < 0 || pos >= length(x))
            throw Error(ErrorCode::OutOfRange, "position out of range");
        Symbol s = x;
        for (;;) {
            Rule r = rule_of(s);
            if (r.kind == Rule::Terminal) return r.letter;
            if (pos < length(r.left)) {
                s = r.left;
            } else {
                pos -= length(r.left);
                s = r.right;
            }
        }
    }

private:
    void validate() {
        int n = variables_.count();
        if (static_cast<int>(rules_.size()) != n)
            throw Error(ErrorCode::MissingRule, "rule count does not match variable count");
        for (int x = 1; x <= n; ++x) {
            const Rule& r = rules_[x - 1];
            if (r.kind == Rule::Pair) {
                for (Symbol s : {r.left, r.right})
                    if (var_of(s) < 1 || var_of(s) > n)
                        throw Error(ErrorCode::UnknownSymbol,
                                    "rule for " + variables_.name(x) + " references unknown variable");
            }
        }
        // Topological sort on the quotient graph identifying X with Xbar.
        std::vector<int> state(n + 1, 0);  // 0 unvisited, 1 on stack, 2 done
        topo_.clear();
        topo_.reserve(n);
        std::vector<int> stack;
        for (int root = 1; root <= n; ++root) {
            if (state[root]) continue;
            stack.push_back(root);
            while (!stack.empty()) {
                int x = stack.back();
                if (state[x] == 0) {
                    state[x] = 1;
                    const Rule& r = rules_[x - 1];
                    if (r.kind == Rule::Pair) {
                        for (Symbol s : {r.left, r.right}) {
                            int y = var_of(s);
                            if (state[y] == 1)
                                throw Error(ErrorCode::CyclicDependency,
                                            "cyclic dependency through " + variables_.name(y));
                            if (state[y] == 0) stack.push_back(y);
                        }
                    }
                } else if (state[x] == 1) {
                    // Children may appear twice on the stack; re-check.
                    const Rule& r = rules_[x - 1];
                    bool ready = true;
                    if (r.kind == Rule::Pair)
                        for (Symbol s : {r.left, r.right})
                            if (state[var_of(s)] != 2) ready = false;
                    if (!ready)
                        throw Error(ErrorCode::CyclicDependency,
                                    "cyclic dependency through " + variables_.name(x));
                    state[x] = 2;
                    topo_.push_back(x);
                    stack.pop_back();
                } else {
                    stack.pop_back();
                }
            }
        }
        lengths_.assign(n, 0);
        heights_.assign(n, 0);
        for (int x : topo_) {
            const Rule& r = rules_[x - 1];
            if (r.kind == Rule::Terminal) {
                lengths_[x - 1] = (r.letter < 0) ? 0 : 1;
                heights_[x - 1] = 1;
            } else {
                lengths_[x - 1] = lengths_[var_of(r.left) - 1] + lengths_[var_of(r.right) - 1];
                heights_[x - 1] =
                    1 + std::max(heights_[var_of(r.left) - 1], heights_[var_of(r.right) - 1]);
            }
        }
    }

    void append_eval(Symbol x, Word& out) const {
        Rule r = rule_of(x);
        if (r.kind == Rule::Terminal) {
            if (r.letter >= 0) out.push_back(r.letter);
            return;
        }
        append_eval(r.left, out);
        append_eval(r.right, out);
    }

    void extract_into(Symbol x, const BigInt& alpha, const BigInt& beta, Word& out) const {
        if (alpha >= beta) return;
        Rule r = rule_of(x);
        if (r.kind == Rule::Terminal) {
            out.push_back(r.letter);
            return;
        }
        const BigInt& ly = length(r.left);
        if (beta <= ly) {
            extract_into(r.left, alpha, beta, out);
        } else if (alpha >= ly) {
            extract_into(r.right, alpha - ly, beta - ly, out);
        } else {
            extract_into(r.left, alpha, ly, out);
            extract_into(r.right, 0, beta - ly, out);
        }
    }

    InvolutiveAlphabet alphabet_;
    VariableSet variables_;
    std::vector<Rule> rules_;
    std::vector<BigInt> lengths_;
    std::vector<int> heights_;
    std::vector<int> topo_;
};

// Mutable staging area for building or extending SLPs.  finalize() runs full
// validation and yields the immutable form.
class SlpBuilder {
public:
    SlpBuilder() = default;
    explicit SlpBuilder(const InvolutiveAlphabet& alphabet) : alphabet_(alphabet) {}
    explicit SlpBuilder(const Slp& base)
        : alphabet_(base.alphabet()), variables_(base.variables()) {
        rules_.reserve(base.size());
        for (int x = 1; x <= base.var_count(); ++x) rules_.push_back(base.rule(x));
    }

    InvolutiveAlphabet& alphabet() { return alphabet_; }
    const InvolutiveAlphabet& alphabet() const { return alphabet_; }
    VariableSet& variables() { return variables_; }

    int add_terminal(const std::string& name, Letter a) {
        int x = variables_.add(name);
        rules_.push_back(a < 0 ? Rule::empty() : Rule::terminal(a));
        return x;
    }

    int add_empty(const std::string& name) { return add_terminal(name, -1); }

    int add_pair(const std::string& name, Symbol y, Symbol z) {
        int x = variables_.add(name);
        rules_.push_back(Rule::pair(y, z));
        return x;
    }

    // Declares a variable now, rule to be supplied later.
    int declare(const std::string& name) {
        int x = variables_.add(name);
        rules_.push_back(Rule::empty());
        pending_.push_back(x);
        return x;
    }

    void define(int x, Rule r) { rules_.at(x - 1) = r; }

    std::string fresh_name(const std::string& stem) {
        for (;;) {
            std::string candidate = stem + "_" + std::to_string(counter_++);
            if (!variables_.has(candidate)) return candidate;
        }
    }

    int var_count() const { return variables_.count(); }

    Slp finalize() const { return Slp(alphabet_, variables_, rules_); }

private:
    InvolutiveAlphabet alphabet_;
    VariableSet variables_;
    std::vector<Rule> rules_;
    std::vector<int> pending_;
    std::uint64_t counter_ = 0;
};

}  // namespace slpwq

#endif
