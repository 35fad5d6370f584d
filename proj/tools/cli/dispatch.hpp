#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace branchlab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;

/**
 * Runs one command line (without the program name). The payload goes to out;
 * usage errors print help text to err and return kExitUsage, library errors
 * print {"error": {"kind", "message"}} to err and return kExitDomainError.
 */
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace branchlab::cli
