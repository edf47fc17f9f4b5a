#include <gtest/gtest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <sstream>
#include <thread>

#include <json.hpp>

#include "lcm_arena/server.hpp"
#include "lcm_arena/session.hpp"

using namespace lcm;
using nlohmann::json;

namespace {

json eqosc_init() { return {{"type", "init"}, {"problem", "eqosc"}, {"d", 3}, {"algo", "eo-sta"}, {"model", "fsta"}}; }

json step(std::vector<std::size_t> act) { return {{"type", "step"}, {"activate", act}}; }

std::size_t line_count(const std::string& s) {
    std::size_t n = 0;
    for (char ch : s) n += ch == '\n';
    return n;
}

bool starts_with(const std::string& s, const std::string& p) { return s.rfind(p, 0) == 0; }

}  // namespace

TEST(Session, Hello) {
    Session s;
    const json r = s.handle({{"type", "hello"}});
    EXPECT_EQ(r["type"], "hello");
    EXPECT_EQ(r["protocol"], "lcm-arena/1");
    EXPECT_NE(std::find(r["algorithms"].begin(), r["algorithms"].end(), "eo-sta"), r["algorithms"].end());
    EXPECT_EQ(r["problems"], json::array({"ae", "eqosc", "rendezvous"}));
}

TEST(Session, InitEqOscGivesInitialState) {
    Session s;
    const json r = s.handle(eqosc_init());
    ASSERT_EQ(r["type"], "state") << r.dump();
    EXPECT_EQ(r["round"], 0);
    ASSERT_EQ(r["robots"].size(), 3u);
    EXPECT_EQ(r["robots"][0]["pos"], json::array({-3.0, 0.0}));
    EXPECT_EQ(r["robots"][1]["pos"], json::array({0.0, 0.0}));
    EXPECT_EQ(r["robots"][2]["pos"], json::array({3.0, 0.0}));
    EXPECT_EQ(r["vis"]["limited"], true);
    EXPECT_DOUBLE_EQ(r["vis"]["radius"].get<double>(), 3.5);
    EXPECT_EQ(r["edges"], json::parse("[[0,1],[1,2]]"));
    EXPECT_EQ(r["verdict"], "RUNNING(0)");
    EXPECT_EQ(r["terminal"], false);
    EXPECT_EQ(r["activated"], json::array());
    EXPECT_EQ(r["moves"], json::array());
    EXPECT_EQ(r["model"], "fsta");
}

TEST(Session, InitAeGapRadius) {
    Session s;
    const json r = s.handle({{"type", "init"}, {"problem", "ae"}, {"algo", "ae-fv"}, {"vis", "limited"}, {"epsilon", 0.5}});
    ASSERT_EQ(r["type"], "state") << r.dump();
    EXPECT_EQ(r["robots"].size(), 4u);
    EXPECT_DOUBLE_EQ(r["vis"]["radius"].get<double>(), 6.5);
}

TEST(Session, LeftTerminalAloneViolatesAtRoundOne) {
    Session s;
    s.handle(eqosc_init());
    const json r = s.handle(step({0}));
    ASSERT_EQ(r["type"], "state") << r.dump();
    EXPECT_EQ(r["round"], 1);
    EXPECT_TRUE(starts_with(r["verdict"].get<std::string>(), "SAFETY_VIOLATION(1): equidistant condition violated"))
        << r["verdict"];
    EXPECT_EQ(r["terminal"], true);
    EXPECT_EQ(r["activated"], json::array({0}));
    ASSERT_EQ(r["moves"].size(), 1u);
    EXPECT_EQ(r["moves"][0]["robot"], 0);
    EXPECT_EQ(r["moves"][0]["to"], json::array({-2.0, 0.0}));

    const json again = s.handle(step({1}));
    EXPECT_EQ(again["type"], "error");
    EXPECT_TRUE(starts_with(again["message"].get<std::string>(), "run already finished"));
}

TEST(Session, AllThreeEachRoundOscillates) {
    Session s;
    s.handle(eqosc_init());
    for (int k = 1; k <= 6; ++k) {
        const json r = s.handle(step({0, 1, 2}));
        ASSERT_EQ(r["type"], "state");
        const double left = r["robots"][0]["pos"][0].get<double>();
        EXPECT_NEAR(left, k % 2 ? -2.0 : -3.0, 1e-9);
        EXPECT_EQ(r["verdict"], "RUNNING(" + std::to_string(k) + ")");
    }
}

TEST(Session, EmptyActivationIsAnError) {
    Session s;
    s.handle(eqosc_init());
    const json r = s.handle(step({}));
    EXPECT_EQ(r["type"], "error");
    EXPECT_EQ(r["message"], "activation set must be non-empty");
    EXPECT_EQ(s.handle({{"type", "verdict"}})["verdict"], "RUNNING(0)");
}

TEST(Session, ErrorsLeaveTheSessionIntact) {
    Session s;
    s.handle(eqosc_init());
    s.handle(step({0, 1, 2}));

    const json bad_json = json::parse(s.handle_line("{\"type\":\"step\", \"activate\": [0"));
    EXPECT_EQ(bad_json["type"], "error");
    EXPECT_TRUE(starts_with(bad_json["message"].get<std::string>(), "malformed JSON"));

    EXPECT_EQ(s.handle({{"type", "warp"}})["type"], "error");
    EXPECT_EQ(s.handle(json::array({1, 2}))["type"], "error");
    EXPECT_EQ(s.handle({{"type", "step"}})["type"], "error");
    EXPECT_EQ(s.handle({{"type", "step"}, {"activate", "all"}})["type"], "error");
    EXPECT_EQ(s.handle(step({5}))["type"], "error");
    const json bad_init = s.handle({{"type", "init"}, {"problem", "eqosc"}, {"vr", 5}});
    EXPECT_EQ(bad_init["type"], "error");
    EXPECT_NE(bad_init["message"].get<std::string>().find("'vr'"), std::string::npos);

    const json v = s.handle({{"type", "verdict"}});
    EXPECT_EQ(v["type"], "verdict");
    EXPECT_EQ(v["verdict"], "RUNNING(1)");
    const json next = s.handle(step({0, 1, 2}));
    EXPECT_EQ(next["round"], 2);
}

TEST(Session, RequestsBeforeInitAreRejected) {
    Session s;
    EXPECT_EQ(s.handle(step({0}))["type"], "error");
    EXPECT_EQ(s.handle({{"type", "verdict"}})["type"], "error");
    EXPECT_EQ(s.handle({{"type", "export"}})["type"], "error");
    EXPECT_FALSE(s.active());
}

TEST(Session, VerdictCarriesFairness) {
    Session s;
    s.handle(eqosc_init());
    for (int k = 0; k < 4; ++k) s.handle(step({0, 1, 2}));
    const json v = s.handle({{"type", "verdict"}});
    EXPECT_EQ(v["terminal"], false);
    EXPECT_EQ(v["fairness"]["pass"], true);
    EXPECT_EQ(v["fairness"]["window"], 6);
}

TEST(Session, ExportOfFreshSessionIsRejected) {
    Session s;
    s.handle(eqosc_init());
    const json r = s.handle({{"type", "export"}});
    EXPECT_EQ(r["type"], "error");
    EXPECT_NE(r["message"].get<std::string>().find("no rounds"), std::string::npos);
}

TEST(Session, ExportAfterFiveRoundsReplays) {
    Session s;
    s.handle(eqosc_init());
    const std::vector<std::vector<std::size_t>> plays = {{0, 1, 2}, {1}, {0, 1, 2}, {1}, {0, 1, 2}};
    for (const auto& p : plays) ASSERT_EQ(s.handle(step(p))["type"], "state");
    const json r = s.handle({{"type", "export"}});
    ASSERT_EQ(r["type"], "export") << r.dump();
    const std::string trace = r["trace"].get<std::string>();
    EXPECT_EQ(line_count(trace), 5u);

    const RunConfig cfg = run_config_from_json(r["config"]);
    EXPECT_EQ(cfg.sched, "scripted");
    ASSERT_EQ(cfg.script.size(), 5u);
    EXPECT_EQ(cfg.horizon, 5u);
    const RunPlan plan = make_plan(cfg);
    const auto events = parse_trace(trace, plan.start().initial());
    const ReplayReport rep = replay(events, plan.instance, plan.algorithm, plan.model, plan.frames);
    EXPECT_TRUE(rep.identical) << rep.field;
    EXPECT_EQ(serialize_trace(plan.execute().trace), trace);
}

TEST(Session, ReinitStartsOver) {
    Session s;
    s.handle(eqosc_init());
    s.handle(step({0}));
    const json r = s.handle(eqosc_init());
    EXPECT_EQ(r["round"], 0);
    EXPECT_EQ(s.handle(step({0, 1, 2}))["verdict"], "RUNNING(1)");
}

namespace {

class Client {
public:
    explicit Client(std::uint16_t port) {
        fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_port = htons(port);
        ::inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
        ok_ = ::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0;
    }
    ~Client() { ::close(fd_); }

    bool ok() const { return ok_; }

    void send_raw(const std::string& data) { ASSERT_EQ(::send(fd_, data.data(), data.size(), 0), static_cast<ssize_t>(data.size())); }

    json read_reply() {
        while (buffer_.find('\n') == std::string::npos) {
            char chunk[4096];
            const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
            if (n <= 0) return json{{"type", "closed"}};
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
        const std::size_t nl = buffer_.find('\n');
        const std::string line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return json::parse(line);
    }

    json request(const json& msg) {
        send_raw(msg.dump() + "\n");
        return read_reply();
    }

private:
    int fd_{-1};
    bool ok_{false};
    std::string buffer_;
};

}  // namespace

TEST(TcpServer, LoopbackSession) {
    TcpServer server(0);
    ASSERT_NE(server.port(), 0);
    std::thread loop([&] { server.serve_forever(); });
    {
        Client c(server.port());
        ASSERT_TRUE(c.ok());
        EXPECT_EQ(c.request({{"type", "hello"}})["protocol"], "lcm-arena/1");
        EXPECT_EQ(c.request(eqosc_init())["round"], 0);

        // Two requests in one packet, the second split across packets.
        const std::string a = step({0, 1, 2}).dump() + "\n";
        const std::string b = step({0, 1, 2}).dump();
        c.send_raw(a + b.substr(0, 5));
        c.send_raw(b.substr(5) + "\r\n");
        EXPECT_EQ(c.read_reply()["round"], 1);
        EXPECT_EQ(c.read_reply()["round"], 2);

        c.send_raw("not json\n");
        EXPECT_EQ(c.read_reply()["type"], "error");
        EXPECT_EQ(c.request(step({}))["message"], "activation set must be non-empty");
        const json v = c.request(step({0}));
        EXPECT_TRUE(starts_with(v["verdict"].get<std::string>(), "SAFETY_VIOLATION(3)")) << v.dump();
    }
    {
        // Each connection gets its own session.
        Client c(server.port());
        ASSERT_TRUE(c.ok());
        EXPECT_EQ(c.request({{"type", "verdict"}})["type"], "error");
    }
    server.stop();
    loop.join();
}

TEST(TcpServer, RejectsBadHost) { EXPECT_THROW(TcpServer(0, "not-an-address"), Error); }
