#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "respmap/model.hpp"

namespace testing_support {

namespace fs = std::filesystem;

std::string read_file(const fs::path& p);
void write_file(const fs::path& p, const std::string& content);

fs::path examples_dir();
fs::path fixture(const std::string& name);  // examples_dir() / name
respmap::ResponsibilityMap load_fixture(const std::string& name);

/// Request bodies for PUT /blocks/1..5 that rebuild `map` block by block.
std::vector<std::string> block_bodies(const respmap::ResponsibilityMap& map);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir();
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const fs::path& path() const noexcept { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

struct ProcessResult {
    int status = -1;
    std::string out;
    std::string err;
};

/// Runs a program to completion, capturing both streams.
ProcessResult run_process(const std::vector<std::string>& argv);

/// Path of the built command-line tool.
std::string cli_path();

/// Background child process, terminated on destruction.
class Child {
public:
    explicit Child(const std::vector<std::string>& argv, const fs::path& stderr_file);
    ~Child();
    Child(const Child&) = delete;
    Child& operator=(const Child&) = delete;

    /// Non-blocking; true once the child has exited (status in `status`).
    bool exited(int& status);
    /// Sends SIGTERM and waits; returns the exit status.
    int terminate();

private:
    int pid_ = -1;
    bool reaped_ = false;
    int status_ = -1;
};

/// A TCP port that was free a moment ago.
int free_port();

}  // namespace testing_support
