#include "muzero/checkpoint.hpp"
#include "muzero/errors.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace muzero {

static_assert(std::endian::native == std::endian::little, "checkpoint codec assumes little-endian");

namespace {

constexpr char kMagic[8] = {'M', 'Z', 'C', 'K', 'P', 'T', '\r', '\n'};

class Writer {
public:
    void raw(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
    void u64(std::uint64_t v) { raw(&v, sizeof v); }
    void u32(std::uint32_t v) { raw(&v, sizeof v); }
    void f64(double v) { raw(&v, sizeof v); }
    void str(const std::string& s) {
        u64(s.size());
        raw(s.data(), s.size());
    }
    void doubles(const std::vector<double>& v) {
        u64(v.size());
        raw(v.data(), v.size() * sizeof(double));
    }
    template <class Rng>
    void rng(const Rng& r) {
        std::ostringstream ss;
        ss << r;
        str(ss.str());
    }
    std::string take() { return std::move(out_); }

private:
    std::string out_;
};

class Reader {
public:
    explicit Reader(const std::string& bytes) : data_(bytes) {}

    void raw(void* p, std::size_t n) {
        if (n > data_.size() - pos_) throw CheckpointError("checkpoint is truncated");
        std::memcpy(p, data_.data() + pos_, n);
        pos_ += n;
    }
    std::uint64_t u64() {
        std::uint64_t v;
        raw(&v, sizeof v);
        return v;
    }
    std::uint32_t u32() {
        std::uint32_t v;
        raw(&v, sizeof v);
        return v;
    }
    double f64() {
        double v;
        raw(&v, sizeof v);
        return v;
    }
    std::size_t count(std::size_t element_size) {
        const auto n = u64();
        if (element_size > 0 && n > (data_.size() - pos_) / element_size)
            throw CheckpointError("checkpoint is truncated");
        return static_cast<std::size_t>(n);
    }
    std::string str() {
        std::string s(count(1), '\0');
        raw(s.data(), s.size());
        return s;
    }
    std::vector<double> doubles() {
        std::vector<double> v(count(sizeof(double)));
        raw(v.data(), v.size() * sizeof(double));
        return v;
    }
    template <class Rng>
    Rng rng() {
        std::istringstream ss(str());
        Rng r;
        ss >> r;
        if (!ss) throw CheckpointError("checkpoint holds a malformed generator state");
        return r;
    }
    bool done() const { return pos_ == data_.size(); }

private:
    const std::string& data_;
    std::size_t pos_ = 0;
};

void write_game(Writer& w, const GameHistory& g) {
    w.u64(g.observations.size());
    for (const auto& o : g.observations) w.doubles(o);
    w.u64(g.actions.size());
    for (auto a : g.actions) w.u64(a);
    w.doubles(g.rewards);
    w.u64(g.policies.size());
    for (const auto& p : g.policies) w.doubles(p);
    w.doubles(g.search_values);
    w.doubles(g.priorities);
}

GameHistory read_game(Reader& r) {
    GameHistory g;
    g.observations.resize(r.count(8));
    for (auto& o : g.observations) o = r.doubles();
    g.actions.resize(r.count(8));
    for (auto& a : g.actions) a = static_cast<Action>(r.u64());
    g.rewards = r.doubles();
    g.policies.resize(r.count(8));
    for (auto& p : g.policies) p = r.doubles();
    g.search_values = r.doubles();
    g.priorities = r.doubles();
    return g;
}

}  // namespace

std::string encode_checkpoint(const TrainingState& s) {
    Writer w;
    w.raw(kMagic, sizeof kMagic);
    w.u32(kCheckpointVersion);
    w.str(format_config(s.config));
    w.u64(s.step);
    w.u64(s.env_steps);
    w.u64(s.episodes);
    w.doubles(s.params);

    w.u64(s.optimizer.t);
    w.f64(s.optimizer.beta1);
    w.f64(s.optimizer.beta2);
    w.f64(s.optimizer.eps);
    w.doubles(s.optimizer.m);
    w.doubles(s.optimizer.v);

    w.rng(s.self_play_rng);

    w.u64(s.replay.next_id);
    w.u64(s.replay.total_steps);
    w.rng(s.replay.rng);
    w.u64(s.replay.entries.size());
    for (const auto& e : s.replay.entries) {
        w.u64(e.id);
        write_game(w, e.game);
    }
    return w.take();
}

TrainingState decode_checkpoint(const std::string& bytes) {
    Reader r(bytes);
    char magic[sizeof kMagic];
    try {
        r.raw(magic, sizeof magic);
    } catch (const CheckpointError&) {
        throw CheckpointError("not a checkpoint file (too short)");
    }
    if (std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw CheckpointError("not a checkpoint file (bad magic)");
    const auto version = r.u32();
    if (version != kCheckpointVersion)
        throw CheckpointError("checkpoint format version " + std::to_string(version) +
                              " is not supported (expected " + std::to_string(kCheckpointVersion) + ")");

    TrainingState s;
    try {
        s.config = parse_config(r.str());
    } catch (const ConfigError& e) {
        throw CheckpointError(std::string("checkpoint holds an invalid config: ") + e.what());
    }
    s.step = r.u64();
    s.env_steps = r.u64();
    s.episodes = r.u64();
    s.params = r.doubles();

    s.optimizer.t = r.u64();
    s.optimizer.beta1 = r.f64();
    s.optimizer.beta2 = r.f64();
    s.optimizer.eps = r.f64();
    s.optimizer.m = r.doubles();
    s.optimizer.v = r.doubles();
    if (s.optimizer.m.size() != s.params.size() || s.optimizer.v.size() != s.params.size())
        throw CheckpointError("checkpoint optimizer state does not match parameters");

    s.self_play_rng = r.rng<std::mt19937_64>();

    s.replay.next_id = r.u64();
    s.replay.total_steps = r.u64();
    s.replay.rng = r.rng<std::mt19937_64>();
    s.replay.entries.resize(r.count(8));
    for (auto& e : s.replay.entries) {
        e.id = r.u64();
        e.game = read_game(r);
    }
    if (!r.done()) throw CheckpointError("checkpoint has trailing bytes");
    return s;
}

void save_checkpoint(const std::filesystem::path& path, const TrainingState& state) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    const auto bytes = encode_checkpoint(state);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw CheckpointError("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw CheckpointError("failed writing " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

TrainingState load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return decode_checkpoint(ss.str());
}

}  // namespace muzero
