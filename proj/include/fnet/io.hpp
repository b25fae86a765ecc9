#ifndef FNET_IO_HPP
#define FNET_IO_HPP

#include <string>
#include <utility>
#include <vector>

namespace fnet::io {

// mkdir -p. Throws on filesystem errors; existing directories are fine.
void ensure_dir(const std::string& path);

// Advisory per-directory lock: creates `<dir>/.lock` exclusively and removes
// it on destruction. A second acquisition of a held lock throws. A stale
// lock left by a crashed process must be removed by hand; the error message
// names the file.
class DirLock {
  public:
    explicit DirLock(const std::string& dir);
    ~DirLock();
    DirLock(const DirLock&) = delete;
    DirLock& operator=(const DirLock&) = delete;
    DirLock(DirLock&& other) noexcept;

  private:
    std::string lock_path_;
    bool held_ = false;
};

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

// `meta` sidecar: key=value lines. Timestamps and host facts go here and
// never into data CSVs, keeping those byte-reproducible. run_meta() returns
// the standard pairs (utc time, host, pid).
std::vector<std::pair<std::string, std::string>> run_meta();
void write_meta(const std::string& dir,
                const std::vector<std::pair<std::string, std::string>>& extra);

}  // namespace fnet::io

#endif
