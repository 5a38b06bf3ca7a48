#include "mts/word_series.hpp"

#include <algorithm>

namespace mts {

std::string_view letters_of(Alphabet alphabet)
{
    return alphabet == Alphabet::AB ? "AB" : "XVF";
}

std::string_view name_of(Alphabet alphabet)
{
    return alphabet == Alphabet::AB ? "{A,B}" : "{X,V,F}";
}

bool contains_letter(Alphabet alphabet, char letter)
{
    return letters_of(alphabet).find(letter) != std::string_view::npos;
}

std::size_t Word::count(char letter) const
{
    return static_cast<std::size_t>(std::count(letters_.begin(), letters_.end(), letter));
}

} // namespace mts
