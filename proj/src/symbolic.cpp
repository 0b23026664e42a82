#include "cantorkit/symbolic.hpp"

#include <algorithm>
#include <sstream>

namespace cantorkit {

std::vector<int> Subshift::successors(int a) const {
    std::vector<int> out;
    for (int b = 0; b < size(); ++b)
        if (allowed[a][b]) out.push_back(b);
    return out;
}

std::vector<int> Subshift::predecessors(int b) const {
    std::vector<int> out;
    for (int a = 0; a < size(); ++a)
        if (allowed[a][b]) out.push_back(a);
    return out;
}

int Subshift::letter_id(const std::string& name) const {
    for (int i = 0; i < size(); ++i)
        if (letters[i] == name) return i;
    return -1;
}

std::vector<std::string> Subshift::check() const {
    std::vector<std::string> problems;
    const int n = size();
    if (n == 0) problems.push_back("empty alphabet");
    if (static_cast<int>(allowed.size()) != n)
        problems.push_back("transition table size mismatch");
    for (int a = 0; a < n; ++a) {
        bool out = false, in = false;
        for (int b = 0; b < n; ++b) {
            out = out || allowed[a][b];
            in = in || allowed[b][a];
        }
        if (!out) problems.push_back("letter " + letters[a] + " has no outgoing transition");
        if (!in) problems.push_back("letter " + letters[a] + " has no incoming transition");
    }
    return problems;
}

Subshift Subshift::full_shift(int n) {
    Subshift s;
    for (int i = 0; i < n; ++i) s.letters.push_back(std::to_string(i));
    s.allowed.assign(n, std::vector<bool>(n, true));
    return s;
}

Subshift Subshift::from_pairs(std::vector<std::string> names,
                              const std::vector<std::pair<int, int>>& pairs) {
    Subshift s;
    s.letters = std::move(names);
    const int n = s.size();
    s.allowed.assign(n, std::vector<bool>(n, false));
    for (auto [a, b] : pairs) {
        if (a < 0 || a >= n || b < 0 || b >= n)
            throw InputError("transition letter out of range");
        s.allowed[a][b] = true;
    }
    return s;
}

bool is_mixing(const Subshift& shift) {
    const int n = shift.size();
    if (n == 0) return false;
    if (!shift.check().empty()) return false;
    // Boolean matrix powers; mixing iff some power is entrywise positive.
    std::vector<std::vector<bool>> m = shift.allowed;
    const int cap = n * n + 1;
    for (int p = 1; p <= cap; ++p) {
        bool all = true;
        for (int a = 0; a < n && all; ++a)
            for (int b = 0; b < n && all; ++b)
                if (!m[a][b]) all = false;
        if (all) return true;
        std::vector<std::vector<bool>> next(n, std::vector<bool>(n, false));
        for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c)
                if (m[a][c])
                    for (int b = 0; b < n; ++b)
                        if (shift.allowed[c][b]) next[a][b] = true;
        m = std::move(next);
    }
    return false;
}

bool Word::operator<(const Word& o) const {
    if (letters.size() != o.letters.size())
        return letters.size() < o.letters.size();
    return letters < o.letters;
}

bool Word::starts_with(const Word& p) const {
    if (p.letters.size() > letters.size()) return false;
    return std::equal(p.letters.begin(), p.letters.end(), letters.begin());
}

bool Word::ends_with(const Word& s) const {
    if (s.letters.size() > letters.size()) return false;
    return std::equal(s.letters.rbegin(), s.letters.rend(), letters.rbegin());
}

Word Word::prefix(int nl) const {
    return Word{std::vector<int>(letters.begin(), letters.begin() + nl)};
}

Word Word::suffix(int nl) const {
    return Word{std::vector<int>(letters.end() - nl, letters.end())};
}

bool admissible(const Subshift& shift, const Word& w) {
    if (w.empty()) return false;
    for (int l : w.letters)
        if (l < 0 || l >= shift.size()) return false;
    for (size_t i = 0; i + 1 < w.letters.size(); ++i)
        if (!shift.allows(w.letters[i], w.letters[i + 1])) return false;
    return true;
}

Word concat(const Word& a, const Word& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    if (a.last() != b.first())
        throw InputError("concat: last letter of a must equal first of b");
    Word r = a;
    r.letters.insert(r.letters.end(), b.letters.begin() + 1, b.letters.end());
    return r;
}

std::vector<int> occurrences(const Word& w, const Word& sub) {
    std::vector<int> pos;
    if (sub.empty() || sub.letters.size() > w.letters.size()) return pos;
    const int last = static_cast<int>(w.letters.size() - sub.letters.size());
    for (int i = 0; i <= last; ++i) {
        if (std::equal(sub.letters.begin(), sub.letters.end(),
                       w.letters.begin() + i))
            pos.push_back(i);
    }
    return pos;
}

std::string format_word(const Subshift& shift, const Word& w) {
    std::ostringstream os;
    for (size_t i = 0; i < w.letters.size(); ++i) {
        if (i) os << '-';
        os << shift.letters[w.letters[i]];
    }
    return os.str();
}

Word parse_word(const Subshift& shift, const std::string& text) {
    Word w;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) throw InputError("empty letter in word: " + text);
        const int id = shift.letter_id(cur);
        if (id < 0) throw InputError("unknown letter '" + cur + "'");
        w.letters.push_back(id);
        cur.clear();
    };
    for (char c : text) {
        if (c == '-')
            flush();
        else
            cur += c;
    }
    flush();
    if (!admissible(shift, w))
        throw InputError("word is not admissible: " + text);
    return w;
}

ThetaTail ThetaTail::append(const Word& w) const {
    if (w.empty()) return *this;
    if (w.first() != last())
        throw InputError("tail append: word must start with theta_0");
    ThetaTail t = *this;
    t.letters.insert(t.letters.end(), w.letters.begin() + 1, w.letters.end());
    return t;
}

void check_tail(const Subshift& shift, const ThetaTail& t) {
    if (t.depth() < 1) throw InputError("tail depth must be >= 1");
    if (!admissible(shift, t.as_word()))
        throw InputError("tail is not admissible");
}

std::string format_tail(const Subshift& shift, const ThetaTail& t) {
    return "…" + format_word(shift, t.as_word());
}

ThetaTail parse_tail(const Subshift& shift, const std::string& text) {
    std::string body = text;
    const std::string ell = "…";
    if (body.rfind(ell, 0) == 0) body = body.substr(ell.size());
    if (body.rfind("...", 0) == 0) body = body.substr(3);
    ThetaTail t{parse_word(shift, body).letters};
    check_tail(shift, t);
    return t;
}

}  // namespace cantorkit
