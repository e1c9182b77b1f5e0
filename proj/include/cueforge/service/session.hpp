#pragma once

#include "cueforge/common/errors.hpp"
#include "cueforge/env/env.hpp"
#include "cueforge/service/codec.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace cueforge {

struct HistoryEntry
{
    enum class Kind
    {
        play,
        edit,
    };
    Kind kind = Kind::play;
    TableState before;
    TableState after;
    Shot shot{};         // play only
    StepResult result{}; // play only
};

struct Session
{
    std::string id;
    TableState initial;
    TableState current;
    std::vector<HistoryEntry> history;
    bool terminated = false;
    std::string created;
    std::string updated;
};

class NotFound : public Error
{
  public:
    using Error::Error;
};

class Conflict : public Error
{
  public:
    using Error::Error;
};

// Replays `history` (plays through step_env, edits verbatim) from `initial`.
TableState replay(const TableState& initial, const std::vector<HistoryEntry>& history);

Json session_to_json(const Session& s);

// Sessions in memory, optionally backed by an append-only JSON-lines log in
// `data_dir` that is replayed on construction. Each session has its own lock;
// the map itself is guarded separately.
class SessionStore
{
  public:
    explicit SessionStore(std::filesystem::path data_dir = {}, std::uint64_t seed = 0);

    // Throws ValidationError for invalid states.
    Session create(const TableState& state);
    Session get(const std::string& id) const;
    // Throws NotFound, Conflict (terminated), ActionError.
    StepResult play(const std::string& id, Shot shot);
    Session replace_state(const std::string& id, const TableState& state);
    // Copy of the current state; suggestions never touch the session.
    TableState snapshot(const std::string& id) const;

    std::size_t size() const;
    const std::vector<std::string>& load_warnings() const { return warnings_; }

  private:
    struct Slot
    {
        mutable std::mutex mutex;
        Session session;
    };

    std::shared_ptr<Slot> slot(const std::string& id) const;
    std::string next_id();
    void append(const Json& record);
    void load();

    std::filesystem::path log_path_;
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    mutable std::mutex map_mutex_;
    std::map<std::string, std::shared_ptr<Slot>> sessions_;
    std::mutex log_mutex_;
    std::ofstream log_;
    std::vector<std::string> warnings_;
};

} // namespace cueforge
