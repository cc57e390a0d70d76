#include "freewalk/word.hpp"

#include <algorithm>
#include <stdexcept>

namespace freewalk {

Word::Word(std::string letters) : letters_(std::move(letters))
{
    for (char c : letters_)
        if (c != 'a' && c != 'b')
            throw std::invalid_argument("word letters must be 'a' or 'b': \"" + letters_ + "\"");
}

Word::Word(std::initializer_list<Letter> letters)
{
    for (Letter l : letters)
        letters_.push_back(static_cast<char>(l));
}

Word Word::parse(std::string_view text)
{
    if (text == "e")
        return Word{};
    return Word(std::string(text));
}

Word Word::repeat(Letter l, std::size_t n)
{
    Word w;
    w.letters_.assign(n, static_cast<char>(l));
    return w;
}

Word Word::alternating(Letter first, std::size_t n)
{
    Word w;
    w.letters_.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        w.letters_.push_back(static_cast<char>(i % 2 == 0 ? first : conjugate(first)));
    return w;
}

Word Word::sub(std::size_t pos, std::size_t n) const
{
    Word w;
    w.letters_ = letters_.substr(pos, n);
    return w;
}

Word involution(const Word& w)
{
    std::string out(w.str().rbegin(), w.str().rend());
    for (char& c : out)
        c = c == 'a' ? 'b' : 'a';
    return Word(std::move(out));
}

std::pair<Word, Word> prefix_ops(const Word& w, std::size_t n)
{
    if (n > w.size())
        throw std::out_of_range("prefix length " + std::to_string(n) + " exceeds word length "
                                + std::to_string(w.size()));
    return {w.sub(0, n), w.sub(n)};
}

std::size_t common_prefix(const Word& x, const Word& y)
{
    auto [ix, iy] = std::mismatch(x.str().begin(), x.str().end(), y.str().begin(), y.str().end());
    return static_cast<std::size_t>(ix - x.str().begin());
}

std::vector<std::size_t> run_lengths(const Word& w)
{
    std::vector<std::size_t> out;
    if (w.empty())
        return out;
    std::size_t len = 1;
    for (std::size_t i = 1; i < w.size(); ++i) {
        if (w[i] == w[i - 1]) {
            out.push_back(len);
            len = 1;
        } else {
            ++len;
        }
    }
    out.push_back(len);
    return out;
}

std::vector<Word> runs(const Word& w)
{
    std::vector<Word> out;
    std::size_t pos = 0;
    for (std::size_t len : run_lengths(w)) {
        out.push_back(w.sub(pos, len));
        pos += len;
    }
    return out;
}

bool is_alternating(const Word& w)
{
    return run_lengths(w).size() <= 1;
}

std::vector<FusionTerm> fuse(const Word& x, const Word& y)
{
    std::vector<FusionTerm> out;
    out.push_back({x + y, Word{}});
    const std::size_t n = x.size();
    for (std::size_t k = 1; k <= std::min(n, y.size()); ++k) {
        if (x[n - k] != conjugate(y[k - 1]))
            break;
        out.push_back({x.sub(0, n - k) + y.sub(k), x.sub(n - k)});
    }
    return out;
}

std::vector<Word> words_of_length(std::size_t n)
{
    std::vector<Word> out;
    out.reserve(std::size_t{1} << n);
    for (std::size_t bits = 0; bits < (std::size_t{1} << n); ++bits) {
        std::string s(n, 'a');
        for (std::size_t i = 0; i < n; ++i)
            if (bits >> (n - 1 - i) & 1)
                s[i] = 'b';
        out.emplace_back(std::move(s));
    }
    return out;
}

std::vector<Word> words_up_to(std::size_t n)
{
    std::vector<Word> out;
    for (std::size_t k = 0; k <= n; ++k) {
        auto level = words_of_length(k);
        out.insert(out.end(), level.begin(), level.end());
    }
    return out;
}

bool is_prefix(const Word& x, const Word& y)
{
    return x.size() <= y.size() && y.str().compare(0, x.size(), x.str()) == 0;
}

} // namespace freewalk
