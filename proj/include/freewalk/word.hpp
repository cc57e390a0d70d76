#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace freewalk {

enum class Letter : char { alpha = 'a', beta = 'b' };

constexpr Letter conjugate(Letter l) noexcept
{
    return l == Letter::alpha ? Letter::beta : Letter::alpha;
}

/// Element of the free monoid on {a, b}. Letters are stored as the
/// characters 'a' and 'b'; the empty word is the empty string.
class Word {
public:
    Word() = default;
    explicit Word(std::string letters);
    Word(std::initializer_list<Letter> letters);

    /// Accepts "" or "e" for the empty word.
    static Word parse(std::string_view text);
    static Word repeat(Letter l, std::size_t n);
    static Word alternating(Letter first, std::size_t n);

    std::size_t size() const noexcept { return letters_.size(); }
    bool empty() const noexcept { return letters_.empty(); }
    Letter operator[](std::size_t i) const { return static_cast<Letter>(letters_[i]); }
    Letter front() const { return static_cast<Letter>(letters_.front()); }
    Letter back() const { return static_cast<Letter>(letters_.back()); }

    const std::string& str() const noexcept { return letters_; }
    /// Same as str() but spells the empty word as "e".
    std::string display() const { return empty() ? std::string("e") : letters_; }

    /// Letters [pos, pos+n).
    Word sub(std::size_t pos, std::size_t n = std::string::npos) const;

    Word& operator+=(const Word& rhs)
    {
        letters_ += rhs.letters_;
        return *this;
    }
    Word& operator+=(Letter l)
    {
        letters_.push_back(static_cast<char>(l));
        return *this;
    }
    friend Word operator+(Word lhs, const Word& rhs) { return lhs += rhs; }

    friend bool operator==(const Word&, const Word&) = default;
    /// Length first, then lexicographic.
    friend std::strong_ordering operator<=>(const Word& a, const Word& b)
    {
        if (auto c = a.size() <=> b.size(); c != 0)
            return c;
        return a.letters_ <=> b.letters_;
    }

private:
    std::string letters_;
};

struct FusionTerm {
    Word summand;
    Word cancelled;
    friend bool operator==(const FusionTerm&, const FusionTerm&) = default;
};

Word involution(const Word& w);

/// ([w]_n, [w]^n): the first n letters and the rest.
std::pair<Word, Word> prefix_ops(const Word& w, std::size_t n);
std::size_t common_prefix(const Word& x, const Word& y);

/// Maximal alternating factors; consecutive runs meet in a repeated letter.
std::vector<Word> runs(const Word& w);
std::vector<std::size_t> run_lengths(const Word& w);
bool is_alternating(const Word& w);

/// Summands of x ⊗ y, ordered by the length of the cancelled middle word.
std::vector<FusionTerm> fuse(const Word& x, const Word& y);

/// All words of length exactly n (lexicographic), and of length <= n (word order).
std::vector<Word> words_of_length(std::size_t n);
std::vector<Word> words_up_to(std::size_t n);

/// true iff y = x w for some w.
bool is_prefix(const Word& x, const Word& y);

} // namespace freewalk

template <>
struct std::hash<freewalk::Word> {
    std::size_t operator()(const freewalk::Word& w) const noexcept
    {
        return std::hash<std::string>{}(w.str());
    }
};
