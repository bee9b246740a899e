#pragma once

namespace park::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSuiteFailed = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;

/// park run <scenario.json> | park suite <list.txt> | park validate <scenario.json>
int main(int argc, char** argv);

}  // namespace park::cli
