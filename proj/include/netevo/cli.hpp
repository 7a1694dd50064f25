#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace netevo::cli {

inline constexpr const char* kArtifactVersion = "1.0.0";

/// Lower-case hex SHA-256 of a file's bytes.
std::string sha256_file(const std::filesystem::path& path);

/// Run manifest: command, resolved configuration, input digests and the
/// outputs it governs. Written with status "incomplete" before any output
/// and rewritten as "complete" (or "failed") afterwards.
class Manifest {
 public:
  Manifest(std::string command, nlohmann::ordered_json config, std::filesystem::path path);

  void add_input(const std::filesystem::path& path);
  void add_output(const std::string& name);
  void write(const std::string& status, const std::string& error = {}) const;

  const std::filesystem::path& path() const { return path_; }

 private:
  std::string command_;
  nlohmann::ordered_json config_;
  std::filesystem::path path_;
  nlohmann::ordered_json inputs_ = nlohmann::ordered_json::array();
  std::vector<std::string> outputs_;
};

/// Entry point behind the `netevo` executable. Returns the process exit
/// code: 0 success, 1 runtime failure, 2 configuration or input error.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace netevo::cli
