#include "cueforge/service/session.hpp"

#include "cueforge/common/errors.hpp"
#include "cueforge/common/parallel.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

namespace cueforge {

namespace {

std::string now_iso()
{
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

bool same_state(const TableState& a, const TableState& b)
{
    if (a.variant != b.variant || a.turn_index != b.turn_index || a.balls.size() != b.balls.size())
        return false;
    for (std::size_t i = 0; i < a.balls.size(); ++i) {
        const Ball &x = a.balls[i], &y = b.balls[i];
        if (x.id != y.id || x.cls != y.cls || x.pocketed != y.pocketed || x.pos.x != y.pos.x || x.pos.y != y.pos.y)
            return false;
    }
    return true;
}

HistoryEntry play_entry(const TableState& before, Shot shot)
{
    HistoryEntry e;
    e.kind = HistoryEntry::Kind::play;
    e.before = before;
    e.shot = shot;
    e.result = step_env(before, shot);
    e.after = e.result.state;
    return e;
}

HistoryEntry edit_entry(const TableState& before, const TableState& after)
{
    HistoryEntry e;
    e.kind = HistoryEntry::Kind::edit;
    e.before = before;
    e.after = after;
    return e;
}

} // namespace

TableState replay(const TableState& initial, const std::vector<HistoryEntry>& history)
{
    TableState s = initial;
    for (const auto& e : history)
        s = e.kind == HistoryEntry::Kind::play ? step_env(s, e.shot).state : e.after;
    return s;
}

Json session_to_json(const Session& s)
{
    Json history = Json::array();
    for (const auto& e : s.history) {
        Json h;
        if (e.kind == HistoryEntry::Kind::play) {
            h["kind"] = "play";
            h["shot"] = shot_to_json(e.shot);
            h["verdict"] = verdict_to_json(e.result.verdict);
            h["reward"] = reward_to_json(e.result.reward);
            h["events"] = events_to_json(e.result.outcome.events);
        } else {
            h["kind"] = "edit";
        }
        h["before"] = state_to_json(e.before);
        h["after"] = state_to_json(e.after);
        history.push_back(std::move(h));
    }
    Json j;
    j["session_id"] = s.id;
    j["state"] = state_to_json(s.current);
    j["initial_state"] = state_to_json(s.initial);
    j["terminated"] = s.terminated;
    j["history"] = std::move(history);
    j["created"] = s.created;
    j["updated"] = s.updated;
    return j;
}

SessionStore::SessionStore(std::filesystem::path data_dir, std::uint64_t seed) : seed_(seed)
{
    if (data_dir.empty())
        return;
    std::filesystem::create_directories(data_dir);
    log_path_ = data_dir / "sessions.jsonl";
    load();
    log_.open(log_path_, std::ios::app);
    if (!log_)
        throw Error("cannot open session log " + log_path_.string());
}

void SessionStore::load()
{
    std::ifstream in(log_path_);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        const std::string where = log_path_.filename().string() + ":" + std::to_string(lineno);
        try {
            const Json rec = Json::parse(line);
            const std::string op = rec.at("op").get<std::string>();
            const std::string id = rec.at("id").get<std::string>();
            const std::string time = rec.value("time", "");
            if (op == "create") {
                auto s = std::make_shared<Slot>();
                s->session.id = id;
                s->session.initial = s->session.current = state_from_json(rec.at("state"));
                s->session.created = s->session.updated = time;
                sessions_[id] = s;
                ++counter_;
                continue;
            }
            const auto it = sessions_.find(id);
            if (it == sessions_.end()) {
                warnings_.push_back(where + ": unknown session " + id);
                continue;
            }
            Session& s = it->second->session;
            if (op == "play") {
                HistoryEntry e = play_entry(s.current, shot_from_json(rec.at("shot")));
                const TableState stored = state_from_json(rec.at("state"));
                if (!same_state(e.after, stored)) {
                    warnings_.push_back(where + ": replayed state differs from the log; keeping the logged state");
                    e.after = e.result.state = stored;
                }
                s.current = e.after;
                s.terminated = e.result.terminated;
                s.history.push_back(std::move(e));
            } else if (op == "edit") {
                const TableState next = state_from_json(rec.at("state"));
                s.history.push_back(edit_entry(s.current, next));
                s.current = next;
                s.terminated = false;
            } else {
                warnings_.push_back(where + ": unknown op " + op);
                continue;
            }
            s.updated = time;
        } catch (const std::exception& e) {
            warnings_.push_back(where + ": skipped (" + e.what() + ")");
        }
    }
}

void SessionStore::append(const Json& record)
{
    if (log_path_.empty())
        return;
    std::lock_guard lock(log_mutex_);
    log_ << record.dump() << '\n';
    log_.flush();
}

std::string SessionStore::next_id()
{
    for (;;) {
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(mix_seed(seed_, counter_++)));
        if (!sessions_.count(buf))
            return buf;
    }
}

std::shared_ptr<SessionStore::Slot> SessionStore::slot(const std::string& id) const
{
    std::lock_guard lock(map_mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end())
        throw NotFound("unknown session " + id);
    return it->second;
}

Session SessionStore::create(const TableState& state)
{
    validate_state(state, default_table());
    auto s = std::make_shared<Slot>();
    s->session.initial = s->session.current = state;
    s->session.created = s->session.updated = now_iso();
    {
        std::lock_guard lock(map_mutex_);
        s->session.id = next_id();
        sessions_[s->session.id] = s;
    }
    Json rec;
    rec["op"] = "create";
    rec["id"] = s->session.id;
    rec["time"] = s->session.created;
    rec["state"] = state_to_json(state);
    append(rec);
    std::lock_guard lock(s->mutex);
    return s->session;
}

Session SessionStore::get(const std::string& id) const
{
    const auto s = slot(id);
    std::lock_guard lock(s->mutex);
    return s->session;
}

TableState SessionStore::snapshot(const std::string& id) const
{
    const auto s = slot(id);
    std::lock_guard lock(s->mutex);
    return s->session.current;
}

StepResult SessionStore::play(const std::string& id, Shot shot)
{
    const auto s = slot(id);
    std::lock_guard lock(s->mutex);
    Session& ses = s->session;
    if (ses.terminated)
        throw Conflict("session " + id + " has terminated");
    HistoryEntry e = play_entry(ses.current, shot);
    ses.current = e.after;
    ses.terminated = e.result.terminated;
    ses.updated = now_iso();
    const StepResult result = e.result;
    ses.history.push_back(std::move(e));

    Json rec;
    rec["op"] = "play";
    rec["id"] = id;
    rec["time"] = ses.updated;
    rec["shot"] = shot_to_json(shot);
    rec["state"] = state_to_json(ses.current);
    append(rec);
    return result;
}

Session SessionStore::replace_state(const std::string& id, const TableState& state)
{
    const auto s = slot(id);
    validate_state(state, default_table());
    std::lock_guard lock(s->mutex);
    Session& ses = s->session;
    ses.history.push_back(edit_entry(ses.current, state));
    ses.current = state;
    ses.terminated = false;
    ses.updated = now_iso();

    Json rec;
    rec["op"] = "edit";
    rec["id"] = id;
    rec["time"] = ses.updated;
    rec["state"] = state_to_json(state);
    append(rec);
    return ses;
}

std::size_t SessionStore::size() const
{
    std::lock_guard lock(map_mutex_);
    return sessions_.size();
}

} // namespace cueforge
