#pragma once

#include <string>
#include <vector>

#include "cantorkit/types.hpp"

namespace cantorkit {

// Subshift of finite type: a finite alphabet together with the set B of
// admissible transitions (a, b).
struct Subshift {
    std::vector<std::string> letters;           // index = letter id
    std::vector<std::vector<bool>> allowed;     // allowed[a][b]

    int size() const { return static_cast<int>(letters.size()); }
    bool allows(int a, int b) const { return allowed[a][b]; }
    std::vector<int> successors(int a) const;
    std::vector<int> predecessors(int b) const;
    int letter_id(const std::string& name) const;  // -1 when absent

    // Every letter must have at least one outgoing and one incoming
    // transition; returns a message per violation.
    std::vector<std::string> check() const;

    static Subshift full_shift(int n);
    static Subshift from_pairs(std::vector<std::string> names,
                               const std::vector<std::pair<int, int>>& pairs);
};

// True iff some power of the transition matrix is entrywise positive
// (checked up to |letters|^2 + 1).
bool is_mixing(const Subshift& shift);

// Finite admissible word. A word with n+1 letters has length n (the
// number of dynamical refinement steps it encodes).
struct Word {
    std::vector<int> letters;

    Word() = default;
    explicit Word(std::vector<int> ls) : letters(std::move(ls)) {}

    int length() const { return static_cast<int>(letters.size()) - 1; }
    int nletters() const { return static_cast<int>(letters.size()); }
    bool empty() const { return letters.empty(); }
    int first() const { return letters.front(); }
    int last() const { return letters.back(); }

    bool operator==(const Word& o) const { return letters == o.letters; }
    bool operator<(const Word& o) const;  // shortlex

    // True when `p` equals the first p.nletters() letters.
    bool starts_with(const Word& p) const;
    bool ends_with(const Word& s) const;

    Word prefix(int nletters) const;
    Word suffix(int nletters) const;
};

bool admissible(const Subshift& shift, const Word& w);

// Paper-style concatenation: last letter of a must equal the first of b;
// the shared letter appears once in the result.
Word concat(const Word& a, const Word& b);

// Start positions (possibly overlapping) where `sub` occurs in `w`.
std::vector<int> occurrences(const Word& w, const Word& sub);

std::string format_word(const Subshift& shift, const Word& w);
Word parse_word(const Subshift& shift, const std::string& text);

// Truncated left-infinite tail theta in Sigma^-: the last depth+1 letters,
// most recent letter last. depth >= 1 is required by construction.
struct ThetaTail {
    std::vector<int> letters;  // oldest first, theta_0 last

    ThetaTail() = default;
    explicit ThetaTail(std::vector<int> ls) : letters(std::move(ls)) {}

    int depth() const { return static_cast<int>(letters.size()) - 1; }
    int last() const { return letters.back(); }
    bool operator==(const ThetaTail& o) const { return letters == o.letters; }

    // Word view of the stored suffix (oldest..newest).
    Word as_word() const { return Word{letters}; }

    // theta*w: w must start with theta_0.
    ThetaTail append(const Word& w) const;

    bool ends_with(const Word& s) const { return as_word().ends_with(s); }
};

void check_tail(const Subshift& shift, const ThetaTail& t);

std::string format_tail(const Subshift& shift, const ThetaTail& t);
ThetaTail parse_tail(const Subshift& shift, const std::string& text);

}  // namespace cantorkit
