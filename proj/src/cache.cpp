#include "cohom/cache.hpp"

#include <atomic>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "cohom/errors.hpp"

namespace cohom {

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 digest failed");
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

SolveCache::SolveCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  if (!dir_.empty()) std::filesystem::create_directories(dir_);
}

std::string SolveCache::key(const nlohmann::json& request) { return sha256_hex(request.dump()); }

std::optional<nlohmann::json> SolveCache::get(const std::string& key) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = memory_.find(key);
    if (it != memory_.end()) {
      ++hits_;
      return it->second;
    }
  }
  if (!dir_.empty()) {
    std::ifstream in(dir_ / (key + ".json"));
    if (in) {
      try {
        nlohmann::json j = nlohmann::json::parse(in);
        std::lock_guard<std::mutex> lock(mutex_);
        memory_.emplace(key, j);
        ++hits_;
        return j;
      } catch (const nlohmann::json::exception&) {
        // Unreadable entry: treat as a miss and let put() replace it.
      }
    }
  }
  std::lock_guard<std::mutex> lock(mutex_);
  ++misses_;
  return std::nullopt;
}

void SolveCache::put(const std::string& key, const nlohmann::json& value) const {
  {
    std::lock_guard<std::mutex> lock(mutex_);
    memory_.emplace(key, value);
  }
  if (dir_.empty()) return;
  const auto path = dir_ / (key + ".json");
  if (std::filesystem::exists(path)) return;
  write_atomic(path, value.dump());
}

std::size_t SolveCache::hits() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return hits_;
}

std::size_t SolveCache::misses() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return misses_;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  static std::atomic<unsigned long> counter{0};
  std::ostringstream suffix;
  suffix << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "." << counter++;
  auto tmp = path;
  tmp += suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + tmp.string());
    out << content;
    if (!out) throw InputError("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace cohom
