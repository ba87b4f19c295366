#pragma once

#include <string>
#include <string_view>

namespace refcheck {

// Strips LaTeX command tokens from pasted reference text. Layout commands
// (\vspace, \hspace, ...) are removed together with their argument; text
// wrappers (\textit, \emph, ...) and unknown macros keep their argument
// content. Comment lines starting with % are dropped, whitespace runs are
// collapsed to single spaces and the result is trimmed. Total function:
// malformed input degrades to keeping the text.
std::string filter_latex(std::string_view input);

}  // namespace refcheck
