#pragma once

#include <ostream>

namespace hartree::cli {

inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kFailed = 2;

// Entry point of hartree_lab; JSON summaries go to out, diagnostics to err.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace hartree::cli
