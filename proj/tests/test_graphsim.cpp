#include "rosa/graphsim/graph.hpp"

#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <thread>

using namespace rosa;
using namespace rosa::graphsim;

namespace {

template <typename F>
Errc error_of(F&& f) {
    try {
        f();
    } catch (const GraphError& e) {
        return e.code();
    }
    FAIL("expected a GraphError");
    return Errc::BadLevel;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::filesystem::path temp_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("rosa_graphsim_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("names follow the slash-segment grammar") {
    CHECK(is_valid_name("/talker"));
    CHECK(is_valid_name("/sensors/lidar_2"));
    CHECK_FALSE(is_valid_name("talker"));
    CHECK_FALSE(is_valid_name("/"));
    CHECK_FALSE(is_valid_name("/a//b"));
    CHECK_FALSE(is_valid_name("/a/"));
    CHECK_FALSE(is_valid_name("/has space"));
    CHECK_FALSE(is_valid_name("/dash-name"));
}

TEST_CASE("register_node") {
    Graph g;
    SUBCASE("single publisher is listed") {
        g.register_node("/talker", {{"/chatter", "std_msgs/String"}});
        const auto snap = g.snapshot();
        CHECK(snap.nodes == std::vector<std::string>{"/talker"});
        REQUIRE(snap.topics.size() == 1);
        CHECK(snap.topics[0] == TopicInfo{"/chatter", "std_msgs/String"});
    }
    SUBCASE("reference four-node graph") {
        for (const char* n : {"/rosout", "/talker", "/listener", "/parameter_server"}) {
            g.register_node(n);
        }
        CHECK(g.snapshot().nodes ==
              std::vector<std::string>{"/rosout", "/talker", "/listener", "/parameter_server"});
    }
    SUBCASE("duplicates and bad names") {
        g.register_node("/talker");
        CHECK(error_of([&] { g.register_node("/talker"); }) == Errc::DuplicateNode);
        CHECK(error_of([&] { g.register_node("talker2"); }) == Errc::InvalidName);
        CHECK(g.snapshot().nodes.size() == 1);
    }
    SUBCASE("rejected registration leaves no trace") {
        g.register_node("/a", {{"/t", "A"}});
        CHECK(error_of([&] { g.register_node("/b", {{"/u", "U"}, {"/t", "B"}}); }) == Errc::TypeMismatch);
        const auto snap = g.snapshot();
        CHECK(snap.nodes.size() == 1);
        CHECK(snap.topics.size() == 1);
    }
}

TEST_CASE("publish delivers through the ring buffer") {
    Graph g;
    auto talker = g.register_node("/talker", {{"/chatter", "std_msgs/String"}});
    int delivered = 0;
    g.register_node("/listener", {}, {{"/chatter", [&](const Payload&) { ++delivered; }, ""}});

    SUBCASE("eleven publishes into depth ten") {
        for (int i = 1; i <= 11; ++i) {
            g.publish(talker, "/chatter", Json{{"data", i}});
        }
        const auto buf = g.topic_buffer("/chatter");
        REQUIRE(buf.size() == 10);
        CHECK(buf.front()["data"] == 2);
        CHECK(buf.back()["data"] == 11);
        CHECK(g.publish_count("/chatter") == 11);
        CHECK(delivered == 11);
    }
    SUBCASE("clock advances by exactly one per publish") {
        const auto before = g.now();
        const auto t = g.publish(talker, "/chatter", Json::object());
        CHECK(t == before + 1);
        CHECK(g.now() == before + 1);
    }
    SUBCASE("undeclared topic and non-publisher") {
        CHECK(error_of([&] { g.publish(talker, "/nope", {}); }) == Errc::UnknownTopic);
        auto listener_handle = g.register_node("/other");
        CHECK(error_of([&] { g.publish(listener_handle, "/chatter", {}); }) == Errc::NotAPublisher);
    }
}

TEST_CASE("joy payload with button B stands a subscriber up") {
    Graph g;
    bool standing = false;
    auto teleop = g.register_node("/teleop", {{"/joy", "sensor_msgs/Joy"}});
    g.register_node("/spot_driver", {}, {{"/joy", [&](const Payload& p) {
                                              if (p["buttons"][1] == 1) {
                                                  standing = true;
                                              }
                                          },
                                          ""}});
    Json joy{{"axes", {0, 0, 0, 0}}, {"buttons", {0, 1, 0, 0}}};
    g.publish(teleop, "/joy", joy);
    CHECK(standing);
}

TEST_CASE("re-entrant publish on the same topic is rejected") {
    Graph g;
    auto pub = g.register_node("/pub", {{"/loop", "T"}});
    std::optional<Errc> seen;
    g.register_node("/echo", {}, {{"/loop", [&](const Payload&) {
                                       try {
                                           g.publish(pub, "/loop", {});
                                       } catch (const GraphError& e) {
                                           seen = e.code();
                                       }
                                   },
                                   ""}});
    g.publish(pub, "/loop", {});
    REQUIRE(seen.has_value());
    CHECK(*seen == Errc::Reentrancy);
    CHECK(g.publish_count("/loop") == 1);
}

TEST_CASE("call_service") {
    Graph g;
    bool raised = false;
    int handler_calls = 0;
    g.register_node("/head", {}, {},
                    {{"/head_raise", {}, [&](const Payload&) {
                          ++handler_calls;
                          raised = true;
                          return Payload{{"ok", true}};
                      }},
                     {"/set_gain", {{"gain", ValueType::Number}}, [](const Payload& r) { return r; }}});

    CHECK(g.call_service("/head_raise", Json::object()) == Json{{"ok", true}});
    CHECK(raised);
    CHECK(g.call_service("/head_raise", Json::object()) == Json{{"ok", true}});
    CHECK(handler_calls == 2);
    CHECK(error_of([&] { g.call_service("/nonexistent", {}); }) == Errc::UnknownService);
    CHECK(error_of([&] { g.call_service("/set_gain", Json::object()); }) == Errc::SchemaViolation);
    CHECK(error_of([&] { g.call_service("/set_gain", Json{{"gain", "high"}}); }) == Errc::SchemaViolation);
    CHECK(g.call_service("/set_gain", Json{{"gain", 2.5}})["gain"] == 2.5);
    CHECK(error_of([&] { g.register_node("/dup", {}, {}, {{"/head_raise", {}, [](const Payload& p) { return p; }}}); }) ==
          Errc::DuplicateService);
}

TEST_CASE("param_access") {
    Graph g;
    CHECK(g.param_access(ParamMode::List).keys.empty());
    g.param_access(ParamMode::Set, "max_speed", Json(1.5));
    CHECK(g.param_access(ParamMode::Get, "max_speed").value == Json(1.5));
    g.param_set("b_key", "x");
    g.param_set("a_key", 3);
    CHECK(g.param_list() == std::vector<std::string>{"a_key", "b_key", "max_speed"});
    CHECK(error_of([&] { g.param_access(ParamMode::Get, "absent"); }) == Errc::UnknownKey);
}

TEST_CASE("graph_snapshot is a value copy") {
    Graph g;
    CHECK(g.snapshot() == GraphSnapshot{});
    g.register_node("/a");
    const auto snap = g.snapshot();
    g.register_node("/b");
    CHECK(snap.nodes == std::vector<std::string>{"/a"});
    CHECK(g.snapshot().nodes.size() == 2);
}

TEST_CASE("log entries are ordered, level-checked and mirrored") {
    const auto dir = temp_dir("log");
    Graph g({10, dir / "spot.log"});
    g.register_node("/talker");

    g.log("/talker", LogLevel::Info, "hello");
    g.log("/talker", LogLevel::Error, "bad\tthing");
    CHECK(error_of([&] { g.log("/talker", "TRACE", "x"); }) == Errc::BadLevel);
    CHECK(error_of([&] { g.log("/ghost", LogLevel::Info, "x"); }) == Errc::UnknownNode);

    const auto entries = g.logs();
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].level == LogLevel::Info);
    CHECK(entries[1].level == LogLevel::Error);
    CHECK(entries[0].tick < entries[1].tick);
    CHECK(read_file(dir / "spot.log") == "1\tINFO\t/talker\thello\n2\tERROR\t/talker\tbad thing\n");
}

TEST_CASE("level filter over seeded entries") {
    Graph g;
    g.register_node("/n");
    for (const char* level : {"ERROR", "INFO", "ERROR", "INFO", "ERROR"}) {
        g.log("/n", level, "x");
    }
    // Seeded above: positions 0, 2, 4 are ERROR.
    int errors = 0;
    for (const auto& e : g.logs()) {
        errors += e.level == LogLevel::Error ? 1 : 0;
    }
    CHECK(errors == 3);
}

TEST_CASE("property: ring-buffer law and exactly-once delivery under random topologies") {
    std::mt19937 rng(20241018);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t depth = 1 + rng() % 12;
        Graph g({depth, std::nullopt});
        const int topics = 1 + static_cast<int>(rng() % 4);
        std::vector<NodeHandle> pubs;
        std::vector<std::vector<int>> received(8);
        std::vector<std::vector<int>> expected_subs(topics);
        for (int t = 0; t < topics; ++t) {
            pubs.push_back(g.register_node("/pub" + std::to_string(t), {{"/t" + std::to_string(t), "T"}}));
        }
        for (int s = 0; s < 8; ++s) {
            std::vector<SubscriptionDecl> subs;
            received[s].assign(topics, 0);
            for (int t = 0; t < topics; ++t) {
                if (rng() % 2 == 0) {
                    subs.push_back({"/t" + std::to_string(t), [&received, s, t](const Payload&) { ++received[s][t]; }, ""});
                    expected_subs[t].push_back(s);
                }
            }
            g.register_node("/sub" + std::to_string(s), {}, std::move(subs));
        }
        std::vector<std::vector<int>> sent(topics);
        const int n = static_cast<int>(rng() % 40);
        for (int i = 0; i < n; ++i) {
            const int t = static_cast<int>(rng() % topics);
            sent[t].push_back(i);
            g.publish(pubs[t], "/t" + std::to_string(t), Json(i));
        }
        for (int t = 0; t < topics; ++t) {
            const auto buf = g.topic_buffer("/t" + std::to_string(t));
            const std::size_t keep = std::min(sent[t].size(), depth);
            REQUIRE(buf.size() == keep);
            for (std::size_t k = 0; k < keep; ++k) {
                CHECK(buf[k] == sent[t][sent[t].size() - keep + k]);
            }
            for (int s : expected_subs[t]) {
                CHECK(received[s][t] == static_cast<int>(sent[t].size()));
            }
        }
    }
}

TEST_CASE("property: identical operation sequences give identical snapshots and log files") {
    auto run = [](const std::filesystem::path& log) {
        Graph g({4, log});
        std::mt19937 rng(7);
        std::vector<NodeHandle> handles;
        for (int i = 0; i < 6; ++i) {
            handles.push_back(g.register_node("/n" + std::to_string(i), {{"/topic" + std::to_string(i % 3), "T"}}));
        }
        for (int i = 0; i < 50; ++i) {
            const auto& h = handles[rng() % handles.size()];
            switch (rng() % 3) {
                case 0: g.publish(h, *g.node(h.name()).publications.begin(), Json(i)); break;
                case 1: g.log(h.name(), LogLevel::Warn, "event " + std::to_string(i)); break;
                default: g.param_set("k" + std::to_string(i % 5), i); break;
            }
        }
        return g.snapshot();
    };
    const auto dir = temp_dir("determinism");
    const auto a = run(dir / "a.log");
    const auto b = run(dir / "b.log");
    CHECK(a.to_json().dump() == b.to_json().dump());
    CHECK(read_file(dir / "a.log") == read_file(dir / "b.log"));
    CHECK_FALSE(read_file(dir / "a.log").empty());
}

TEST_CASE("concurrent publishers are serialized by the guard") {
    Graph g;
    std::vector<NodeHandle> pubs;
    for (int i = 0; i < 4; ++i) {
        pubs.push_back(g.register_node("/p" + std::to_string(i), {{"/shared", "T"}}));
    }
    std::atomic<int> delivered{0};
    g.register_node("/sink", {}, {{"/shared", [&](const Payload&) { ++delivered; }, ""}});
    std::vector<std::thread> threads;
    for (int i = 0; i < 4; ++i) {
        threads.emplace_back([&, i] {
            for (int k = 0; k < 250; ++k) {
                g.publish(pubs[i], "/shared", Json(k));
            }
        });
    }
    for (auto& t : threads) {
        t.join();
    }
    CHECK(delivered == 1000);
    CHECK(g.publish_count("/shared") == 1000);
    CHECK(g.now() == 1000);
}
