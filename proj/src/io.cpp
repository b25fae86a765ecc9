#include "fnet/io.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <stdexcept>

namespace fnet::io {

void ensure_dir(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec)
        throw std::runtime_error("ensure_dir: " + path + ": " + ec.message());
}

DirLock::DirLock(const std::string& dir) : lock_path_(dir + "/.lock") {
    int fd = ::open(lock_path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0)
        throw std::runtime_error(
            "output directory is locked by another run (" + lock_path_ +
            "); remove the file if that run is dead");
    char pid[32];
    std::snprintf(pid, sizeof pid, "%ld\n", (long)::getpid());
    [[maybe_unused]] ssize_t n = ::write(fd, pid, std::strlen(pid));
    ::close(fd);
    held_ = true;
}

DirLock::~DirLock() {
    if (held_) ::unlink(lock_path_.c_str());
}

DirLock::DirLock(DirLock&& other) noexcept
    : lock_path_(std::move(other.lock_path_)), held_(other.held_) {
    other.held_ = false;
}

void write_text(const std::string& path, const std::string& content) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_text: cannot open " + path);
    if (std::fwrite(content.data(), 1, content.size(), f) != content.size()) {
        std::fclose(f);
        throw std::runtime_error("write_text: short write to " + path);
    }
    std::fclose(f);
}

std::string read_text(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "rb");
    if (!f) throw std::runtime_error("read_text: cannot open " + path);
    std::string out;
    char buf[1 << 14];
    size_t got;
    while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) out.append(buf, got);
    std::fclose(f);
    return out;
}

std::vector<std::pair<std::string, std::string>> run_meta() {
    std::vector<std::pair<std::string, std::string>> kv;
    std::time_t now = std::time(nullptr);
    char stamp[64];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    kv.emplace_back("time_utc", stamp);
    char host[256] = "unknown";
    ::gethostname(host, sizeof host - 1);
    kv.emplace_back("host", host);
    kv.emplace_back("pid", std::to_string((long)::getpid()));
    return kv;
}

void write_meta(const std::string& dir,
                const std::vector<std::pair<std::string, std::string>>& extra) {
    std::string body;
    for (const auto& [key, value] : run_meta())
        body += key + "=" + value + "\n";
    for (const auto& [key, value] : extra) body += key + "=" + value + "\n";
    write_text(dir + "/meta", body);
}

}  // namespace fnet::io
