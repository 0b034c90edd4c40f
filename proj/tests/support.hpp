#pragma once

// Process/filesystem helpers shared by the test binaries.

#include <sys/wait.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace testsupport {

/// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        const int id = counter.fetch_add(1);
        path_ = std::filesystem::temp_directory_path() /
                ("infogeo_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(id));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Run a command line through the shell, capturing exit code and streams.
/// Paths involved must not contain shell metacharacters (the tests only use
/// paths they created themselves).
inline RunResult run_command(const std::string& command, const std::filesystem::path& scratch) {
    const auto out_path = scratch / "cmd_stdout.txt";
    const auto err_path = scratch / "cmd_stderr.txt";
    const std::string full =
        command + " >" + out_path.string() + " 2>" + err_path.string();
    const int status = std::system(full.c_str());

    RunResult r;
    if (status == -1)
        r.exit_code = -1;
    else if (WIFEXITED(status))
        r.exit_code = WEXITSTATUS(status);
    else
        r.exit_code = 128;
    r.out = slurp(out_path);
    r.err = slurp(err_path);
    return r;
}

inline bool files_identical(const std::filesystem::path& a, const std::filesystem::path& b) {
    return slurp(a) == slurp(b);
}

}  // namespace testsupport
