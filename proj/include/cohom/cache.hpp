#ifndef COHOM_CACHE_HPP
#define COHOM_CACHE_HPP

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "json.hpp"

namespace cohom {

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& data);

/// Content-addressed store of JSON documents. Keys are the SHA-256 of the
/// canonical (sorted-key) dump of the request; entries are written once via
/// temp file + rename, so concurrent writers of the same key are harmless.
class SolveCache {
 public:
  /// Empty directory: memory only.
  explicit SolveCache(std::filesystem::path dir = {});

  static std::string key(const nlohmann::json& request);

  std::optional<nlohmann::json> get(const std::string& key) const;
  void put(const std::string& key, const nlohmann::json& value) const;

  const std::filesystem::path& directory() const { return dir_; }
  std::size_t hits() const;
  std::size_t misses() const;

 private:
  std::filesystem::path dir_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, nlohmann::json> memory_;
  mutable std::size_t hits_ = 0;
  mutable std::size_t misses_ = 0;
};

/// Writes `content` to `path` through a temporary sibling and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace cohom

#endif  // COHOM_CACHE_HPP
