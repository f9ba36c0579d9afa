#include "helpers.hpp"

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <signal.h>
#include <spawn.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <fstream>
#include <json.hpp>
#include <random>
#include <sstream>
#include <stdexcept>

#include "respmap/format.hpp"

extern char** environ;

namespace testing_support {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + p.string());
}

fs::path examples_dir() { return RESPMAP_EXAMPLES_DIR; }

fs::path fixture(const std::string& name) { return examples_dir() / name; }

respmap::ResponsibilityMap load_fixture(const std::string& name) {
    auto r = respmap::parse_rmap(read_file(fixture(name)));
    if (!r.ok()) throw std::runtime_error("fixture " + name + " does not parse");
    return *r.map;
}

TempDir::TempDir() {
    std::random_device rd;
    for (int attempt = 0; attempt < 100; ++attempt) {
        path_ = fs::temp_directory_path() / ("respmap-test-" + std::to_string(rd()));
        if (fs::create_directory(path_)) return;
    }
    throw std::runtime_error("cannot create temp dir");
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::vector<std::string> block_bodies(const respmap::ResponsibilityMap& map) {
    const auto doc = nlohmann::ordered_json::parse(respmap::emit_interchange(map));
    std::vector<std::string> out;
    for (const char* key : {"actors", "tasks", "responsibilities", "authorities", "channels"}) {
        nlohmann::ordered_json body;
        body[key] = doc.contains(key) ? doc[key] : nlohmann::ordered_json::object();
        out.push_back(body.dump());
    }
    return out;
}

std::string cli_path() { return RESPMAP_CLI_PATH; }

namespace {

pid_t spawn(const std::vector<std::string>& argv, const fs::path* out_file, const fs::path& err_file) {
    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_addopen(&actions, 0, "/dev/null", O_RDONLY, 0);
    if (out_file) {
        posix_spawn_file_actions_addopen(&actions, 1, out_file->c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    } else {
        posix_spawn_file_actions_addopen(&actions, 1, "/dev/null", O_WRONLY, 0);
    }
    posix_spawn_file_actions_addopen(&actions, 2, err_file.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    pid_t pid = -1;
    const int rc = posix_spawn(&pid, args[0], &actions, nullptr, args.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    if (rc != 0) throw std::runtime_error("cannot spawn " + argv[0]);
    return pid;
}

int decode(int raw) { return WIFEXITED(raw) ? WEXITSTATUS(raw) : 128 + WTERMSIG(raw); }

}  // namespace

ProcessResult run_process(const std::vector<std::string>& argv) {
    TempDir tmp;
    const fs::path out = tmp / "stdout";
    const fs::path err = tmp / "stderr";
    const pid_t pid = spawn(argv, &out, err);
    int raw = 0;
    waitpid(pid, &raw, 0);
    ProcessResult r;
    r.status = decode(raw);
    r.out = read_file(out);
    r.err = read_file(err);
    return r;
}

Child::Child(const std::vector<std::string>& argv, const fs::path& stderr_file)
    : pid_(spawn(argv, nullptr, stderr_file)) {}

Child::~Child() {
    if (!reaped_) terminate();
}

bool Child::exited(int& status) {
    if (reaped_) {
        status = status_;
        return true;
    }
    int raw = 0;
    if (waitpid(pid_, &raw, WNOHANG) == pid_) {
        reaped_ = true;
        status_ = status = decode(raw);
        return true;
    }
    return false;
}

int Child::terminate() {
    if (reaped_) return status_;
    kill(pid_, SIGTERM);
    int raw = 0;
    waitpid(pid_, &raw, 0);
    reaped_ = true;
    status_ = decode(raw);
    return status_;
}

int free_port() {
    const int fd = socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = 0;
    bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
    socklen_t len = sizeof addr;
    getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    const int port = ntohs(addr.sin_port);
    close(fd);
    return port;
}

}  // namespace testing_support
