#pragma once

// Output directory of one command run: refuses to reuse a directory unless
// forced, and writes the manifest next to the outputs.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "fkrc/error.hpp"
#include "fkrc/run_config.hpp"

#ifndef FKRC_VERSION
#define FKRC_VERSION "0.0.0"
#endif

namespace fkrc::cli {

namespace fs = std::filesystem;

class OutputDir {
 public:
  /// Creates `path`. An existing non-empty directory is an error unless
  /// `force`, and even then only a previous run's directory (one holding a
  /// manifest) is cleared.
  OutputDir(const std::string& path, bool force) : root_(path) {
    if (path.empty()) throw ConfigError("out", "out: no output directory given");
    if (fs::exists(root_)) {
      if (!fs::is_directory(root_)) throw ConfigError("out", "out: " + path + " exists and is not a directory");
      if (!fs::is_empty(root_)) {
        if (!force) throw ConfigError("out", "out: " + path + " already holds outputs; pass --force to replace them");
        if (!fs::exists(root_ / "manifest.txt"))
          throw ConfigError("out", "out: " + path + " is not an fkrc output directory; refusing to clear it");
        fs::remove_all(root_);
      }
    }
    fs::create_directories(root_);
  }

  const fs::path& root() const { return root_; }

  /// Removes the directory after a failed run; nothing else wrote to it.
  void discard() const {
    std::error_code ec;
    fs::remove_all(root_, ec);
  }

  /// Opens root/rel for writing, creating parent directories.
  std::ofstream open(const std::string& rel) const {
    const auto p = root_ / rel;
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    require(static_cast<bool>(out), ErrorCode::InvalidArgument, "cannot write " + p.string());
    return out;
  }

  void write(const std::string& rel, const std::string& text) const { open(rel) << text; }

  void manifest(const std::string& command, const RunConfig& cfg) const {
    std::ostringstream os;
    os << "fkrc " << FKRC_VERSION << "\n"
       << "command = " << command << "\n"
       << "seed = " << cfg.str("seed", "none") << "\n"
       << "[config]\n"
       << cfg.echo();
    write("manifest.txt", os.str());
  }

 private:
  fs::path root_;
};

}  // namespace fkrc::cli
