#ifndef SLPWQ_ALPHABET_HPP
#define SLPWQ_ALPHABET_HPP

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace slpwq {

// Error taxonomy shared by all modules.  The CLI maps Error to exit code 2.
enum class ErrorCode {
    DuplicateLhs,
    MissingRule,
    CyclicDependency,
    UnknownSymbol,
    UnknownVariable,
    IndexOutOfRange,
    OutOfRange,
    CapExceeded,
    MalformedQuestion,
    PreconditionViolated,
    NonGroupAlphabet,
    UnknownEndomorphism,
    UnknownLetter,
    NotASolution,
    NotTriangular,
    NotReduced,
    MissingAssignment,
    InvolutionMismatch,
    InternalInvariantViolation,
    ParseError,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

using Letter = std::int32_t;

// A word is a sequence of interned letter ids.
using Word = std::vector<Letter>;

// Finite alphabet with an involution a -> bar(a).  Fixed points are allowed
// (self-inverse letters); group-generator alphabets require bar to be
// fixed-point free and modules that work over free groups check for that.
class InvolutiveAlphabet {
public:
    InvolutiveAlphabet() = default;

    // Adds the pair a/abar.  Passing the same name twice declares a
    // self-inverse letter.
    void add_pair(const std::string& a, const std::string& abar) {
        if (index_.count(a) || (a != abar && index_.count(abar)))
            throw Error(ErrorCode::DuplicateLhs, "letter declared twice: " + a);
        Letter ia = intern(a);
        Letter ib = (a == abar) ? ia : intern(abar);
        bar_.resize(names_.size(), -1);
        bar_[ia] = ib;
        bar_[ib] = ia;
    }

    bool has(const std::string& name) const { return index_.count(name) != 0; }

    Letter id(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw Error(ErrorCode::UnknownSymbol, "unknown letter: " + name);
        return it->second;
    }

    const std::string& name(Letter a) const { return names_.at(a); }

    Letter bar(Letter a) const { return bar_.at(a); }

    std::size_t size() const { return names_.size(); }

    bool fixed_point_free() const {
        for (Letter a = 0; a < static_cast<Letter>(names_.size()); ++a)
            if (bar_[a] == a) return false;
        return true;
    }

    Word involution(const Word& w) const {
        Word out(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) out[w.size() - 1 - i] = bar_[w[i]];
        return out;
    }

    std::string str(const Word& w, const char* sep = "") const {
        std::string out;
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (i) out += sep;
            out += names_[w[i]];
        }
        return out;
    }

private:
    Letter intern(const std::string& name) {
        Letter id = static_cast<Letter>(names_.size());
        names_.push_back(name);
        index_.emplace(name, id);
        return id;
    }

    std::vector<std::string> names_;
    std::vector<Letter> bar_;
    std::unordered_map<std::string, Letter> index_;
};

// A symbol refers to a variable X (positive id, 1-based) or its involution
// X-bar (negated id).  Id 0 is unused.
using Symbol = std::int32_t;

inline Symbol bar(Symbol s) { return -s; }
inline int var_of(Symbol s) { return s < 0 ? -s : s; }
inline bool positive(Symbol s) { return s > 0; }

// The variable set Omega = Omega+ and its disjoint barred copy.  Only the
// positive names are stored; ~name denotes the barred variable in text form.
class VariableSet {
public:
    int add(const std::string& name) {
        if (index_.count(name))
            throw Error(ErrorCode::DuplicateLhs, "variable declared twice: " + name);
        names_.push_back(name);
        int id = static_cast<int>(names_.size());
        index_.emplace(name, id);
        return id;
    }

    int ensure(const std::string& name) {
        auto it = index_.find(name);
        return it != index_.end() ? it->second : add(name);
    }

    bool has(const std::string& name) const { return index_.count(name) != 0; }

    int id(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end())
            throw Error(ErrorCode::UnknownVariable, "unknown variable: " + name);
        return it->second;
    }

    const std::string& name(int id) const { return names_.at(id - 1); }

    std::string symbol_name(Symbol s) const {
        return positive(s) ? name(s) : "~" + name(-s);
    }

    int count() const { return static_cast<int>(names_.size()); }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, int> index_;
};

}  // namespace slpwq

#endif
