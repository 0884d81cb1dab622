#pragma once

#include <string>
#include <vector>

#include "treent/error.hpp"

namespace treent {

// Ordered finite color set M. The ordering is total and fixed; canonical
// forms and file formats depend on it.
class ColorAlphabet {
public:
    explicit ColorAlphabet(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
        require(!symbols_.empty(), "alphabet: must be non-empty");
        for (size_t i = 0; i < symbols_.size(); ++i) {
            const std::string& s = symbols_[i];
            require(!s.empty(), "alphabet: empty symbol");
            require(s.find(',') == std::string::npos && s.find('#') == std::string::npos &&
                        s.find_first_of(" \t;") == std::string::npos,
                    "alphabet: symbol contains a reserved character: " + s);
            for (size_t j = i + 1; j < symbols_.size(); ++j)
                require(symbols_[i] != symbols_[j], "alphabet: duplicate symbol " + s);
        }
    }

    static ColorAlphabet binary() { return ColorAlphabet({"0", "1"}); }

    static ColorAlphabet of_size(int m) {
        std::vector<std::string> syms;
        for (int i = 0; i < m; ++i) syms.push_back(std::to_string(i));
        return ColorAlphabet(std::move(syms));
    }

    int size() const { return static_cast<int>(symbols_.size()); }

    const std::string& symbol(int i) const { return symbols_.at(i); }

    int index_of(const std::string& s) const {
        for (size_t i = 0; i < symbols_.size(); ++i)
            if (symbols_[i] == s) return static_cast<int>(i);
        throw Error("alphabet: unknown symbol '" + s + "'");
    }

    bool operator==(const ColorAlphabet& o) const { return symbols_ == o.symbols_; }
    bool operator!=(const ColorAlphabet& o) const { return !(*this == o); }

    // Alphabet for couplings: pairs (a,b) ordered with the first coordinate
    // major, written "a|b".
    static ColorAlphabet product(const ColorAlphabet& a, const ColorAlphabet& b) {
        std::vector<std::string> syms;
        syms.reserve(static_cast<size_t>(a.size()) * b.size());
        for (int i = 0; i < a.size(); ++i)
            for (int j = 0; j < b.size(); ++j)
                syms.push_back(a.symbol(i) + "|" + b.symbol(j));
        return ColorAlphabet(std::move(syms));
    }

private:
    std::vector<std::string> symbols_;
};

}  // namespace treent
