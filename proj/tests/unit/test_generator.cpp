/* Copyright 2026 The dagoffload Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "dagoffload/dataset.hpp"
#include "dagoffload/generator.hpp"
#include "dagoffload/rng.hpp"
#include "dagoffload/serialization.hpp"

using namespace dagoffload;

namespace {

std::size_t width_cap(const GeneratorConfig& c) {
    return static_cast<std::size_t>(std::max(1L, std::lround(c.fat * std::sqrt(static_cast<double>(c.n)))));
}

// Level of each task, recovered from the widths (tasks are numbered level by level).
std::vector<std::size_t> task_levels(const std::vector<std::size_t>& widths) {
    std::vector<std::size_t> out;
    for (std::size_t l = 0; l < widths.size(); ++l) out.insert(out.end(), widths[l], l);
    return out;
}

std::filesystem::path temp_dir(const std::string& name) {
    auto d = std::filesystem::temp_directory_path() / ("dagoffload_test_" + name);
    std::filesystem::remove_all(d);
    return d;
}

} // namespace

TEST(Generator, SingleTask) {
    GeneratorConfig c;
    c.n = 1;
    const TaskGraph g = generate_dag(c);
    EXPECT_EQ(g.size(), 1u);
    EXPECT_TRUE(g.edges().empty());
}

TEST(Generator, TwentyTaskProtocolShape) {
    GeneratorConfig c;
    c.n = 20;
    c.fat = 0.8;
    c.density = 0.6;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        c.seed = seed;
        const TaskGraph g = generate_dag(c);
        EXPECT_EQ(g.size(), 20u);
        EXPECT_FALSE(g.entry_tasks().empty());
        EXPECT_FALSE(g.exit_tasks().empty());
    }
}

TEST(Generator, DeterministicSerialisation) {
    GeneratorConfig c;
    c.seed = 1234;
    EXPECT_EQ(dump(graph_to_json(generate_dag(c))), dump(graph_to_json(generate_dag(c))));
    GeneratorConfig d = c;
    d.seed = 1235;
    EXPECT_NE(dump(graph_to_json(generate_dag(c))), dump(graph_to_json(generate_dag(d))));
}

TEST(Generator, LayeredStructure) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        GeneratorConfig c;
        c.n = 1 + seed % 30;
        c.fat = 0.1 + 0.009 * static_cast<double>(seed);
        c.density = 0.05 + 0.0095 * static_cast<double>(seed);
        c.seed = seed;
        const auto widths = level_widths(c);
        const TaskGraph g = generate_dag(c);
        std::size_t total = 0;
        for (std::size_t w : widths) {
            EXPECT_GE(w, 1u);
            EXPECT_LE(w, width_cap(c));
            total += w;
        }
        EXPECT_EQ(total, c.n);
        EXPECT_EQ(*std::max_element(widths.begin(), widths.end()), std::min(c.n, width_cap(c)));
        const auto level = task_levels(widths);
        for (const Edge& e : g.edges()) EXPECT_EQ(level[e.parent] + 1, level[e.child]);
        for (TaskId v = 0; v < g.size(); ++v) {
            EXPECT_EQ(g.is_entry(v), level[v] == 0);
            const Task& t = g.task(v);
            EXPECT_GE(t.cycles, c.cycles_range.lo);
            EXPECT_LE(t.cycles, c.cycles_range.hi);
            EXPECT_EQ(t.cycles, std::round(t.cycles));
            EXPECT_EQ(t.data_up, std::round(t.data_up));
            EXPECT_LE(t.data_do, t.data_up + 1.0);
            EXPECT_GE(t.data_do, 0.1 * t.data_up - 1.0);
        }
    }
}

TEST(Generator, FatNeverShrinksMaxWidth) {
    // Exhaustive over a fat grid and many seeds.
    for (std::size_t n = 1; n <= 40; ++n) {
        for (std::uint64_t seed = 0; seed < 50; ++seed) {
            std::size_t prev = 0;
            for (int f = 1; f <= 20; ++f) {
                GeneratorConfig c;
                c.n = n;
                c.fat = f / 20.0;
                c.seed = seed;
                const auto w = level_widths(c);
                const std::size_t m = *std::max_element(w.begin(), w.end());
                EXPECT_GE(m, prev) << "n=" << n << " seed=" << seed << " fat=" << c.fat;
                prev = m;
            }
        }
    }
}

TEST(Generator, DensityOneConnectsAdjacentLevelsCompletely) {
    GeneratorConfig c;
    c.n = 25;
    c.density = 1.0;
    c.seed = 3;
    const auto widths = level_widths(c);
    std::size_t expected = 0;
    for (std::size_t l = 1; l < widths.size(); ++l) expected += widths[l - 1] * widths[l];
    EXPECT_EQ(generate_dag(c).edges().size(), expected);
}

TEST(Generator, MeasuredCcrWithinTenPercent) {
    for (double ccr : {0.3, 0.4, 0.5, 1.0}) {
        GeneratorConfig c;
        c.ccr = ccr;
        double comm = 0.0, comp = 0.0;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            c.seed = derive_seed(77, {seed});
            const TaskGraph g = generate_dag(c);
            for (const Task& t : g.tasks()) {
                comp += t.cycles / c.device_speed;
                comm += (t.data_up + t.data_do) * 8.0 / c.reference_rate;
            }
            EXPECT_NEAR(measured_ccr(g, c.reference_rate, c.device_speed), ccr, 0.01 * ccr);
        }
        EXPECT_NEAR(comm / comp, ccr, 0.1 * ccr);
    }
}

TEST(Generator, InvalidConfigs) {
    auto code = [](GeneratorConfig c) {
        try {
            generate_dag(c);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::InvalidArgument;
    };
    GeneratorConfig c;
    c.n = 0;
    EXPECT_EQ(code(c), ErrorCode::InvalidConfig);
    c = {};
    c.fat = 0.0;
    EXPECT_EQ(code(c), ErrorCode::InvalidConfig);
    c = {};
    c.density = 1.5;
    EXPECT_EQ(code(c), ErrorCode::InvalidConfig);
    c = {};
    c.ccr = -1.0;
    EXPECT_EQ(code(c), ErrorCode::InvalidConfig);
    c = {};
    c.data_range = {5e4, 5e3};
    EXPECT_EQ(code(c), ErrorCode::InvalidConfig);
}

TEST(Dataset, PaperProtocolManifest) {
    const DatasetManifest m = paper_protocol_manifest(9);
    ASSERT_EQ(m.sets.size(), 25u);
    std::size_t train = 0;
    for (const DatasetSet& s : m.sets) {
        EXPECT_EQ(s.dag_count, 100u);
        EXPECT_EQ(s.config.n, 20u);
        EXPECT_TRUE(s.paper_protocol);
        train += s.split == Split::Train;
    }
    EXPECT_EQ(train, 22u);
    EXPECT_NE(manifest_to_json(paper_protocol_manifest(9)), manifest_to_json(paper_protocol_manifest(10)));
}

TEST(Dataset, PaperProtocolDrawsShapesPerDag) {
    DatasetManifest m = paper_protocol_manifest(4, 20, 2, 30, 1);
    const Dataset ds = generate_dataset(m);
    const std::vector<double> grid{0.4, 0.5, 0.6, 0.7, 0.8};
    for (const auto& s : ds.sets) {
        ASSERT_EQ(s.dags.size(), 30u);
        for (const auto& r : s.dags) {
            EXPECT_NE(std::find(grid.begin(), grid.end(), r.meta.fat), grid.end());
            EXPECT_NE(std::find(grid.begin(), grid.end(), r.meta.density), grid.end());
            EXPECT_GE(r.meta.ccr, 0.3);
            EXPECT_LE(r.meta.ccr, 0.5);
            EXPECT_EQ(r.graph.size(), 20u);
        }
    }
}

TEST(Dataset, EmptySetAndRoundTrip) {
    DatasetManifest m;
    m.seed = 5;
    DatasetSet a;
    a.set_id = 0;
    a.dag_count = 0;
    DatasetSet b;
    b.set_id = 3;
    b.dag_count = 4;
    b.split = Split::Test;
    b.config.n = 7;
    m.sets = {a, b};
    const Dataset ds = generate_dataset(m);
    EXPECT_TRUE(ds.set(0).dags.empty());
    const auto dir = temp_dir("roundtrip");
    write_dataset(ds, dir);
    EXPECT_TRUE(std::filesystem::exists(dir / "manifest.json"));
    EXPECT_TRUE(std::filesystem::exists(dir / "dag_3_0.json"));
    const Dataset back = load_dataset(dir);
    ASSERT_EQ(back.sets.size(), 2u);
    EXPECT_EQ(back.set(3).dags.size(), 4u);
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(back.set(3).dags[i].graph, ds.set(3).dags[i].graph);
    EXPECT_EQ(back.split(Split::Test).size(), 1u);

    // Same manifest, same bytes.
    const auto dir2 = temp_dir("roundtrip2");
    write_dataset(generate_dataset(m, 3), dir2);
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        EXPECT_EQ(read_text_file(entry.path()), read_text_file(dir2 / entry.path().filename()));
    }
    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(dir2);
}

TEST(Dataset, Errors) {
    try {
        load_dataset(temp_dir("missing"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::MissingDataset);
    }
    DatasetManifest m;
    DatasetSet s;
    m.sets = {s, s};
    EXPECT_THROW(m.validate(), Error);
    EXPECT_THROW(manifest_from_json(Json::parse(R"({"sets": [{"set_id": 0}]})")), Error);
    EXPECT_THROW(manifest_from_json(Json::parse(R"({"prng": "other", "sets": []})")), Error);
}
