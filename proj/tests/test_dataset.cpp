#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "domcx/csv.hpp"
#include "domcx/dataset.hpp"
#include "domcx/error.hpp"

using namespace domcx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "domcx_test_dataset";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("constructor validates invariants") {
    std::vector<double> f{0, 1, 2, 3};
    CHECK_NOTHROW(TaskDataset("ok", 1, f, {0, 1, 0, 1}, 2, {0, 1}, {2, 3}));
    CHECK_THROWS_AS(TaskDataset("n", 3, f, {0, 1, 0, 1}, 2, {0, 1}, {2, 3}), ShapeError);
    CHECK_THROWS_AS(TaskDataset("l", 1, f, {0, 1, 0, 2}, 2, {0, 1}, {2, 3}), InvalidArgument);
    CHECK_THROWS_AS(TaskDataset("o", 1, f, {0, 1, 0, 1}, 2, {0, 1, 2}, {2, 3}), InvalidArgument);
    CHECK_THROWS_AS(TaskDataset("c", 1, f, {0, 1, 0, 1}, 2, {0, 1}, {2}), InvalidArgument);
}

TEST_CASE("random split is disjoint, covering and seeded") {
    std::vector<double> f(100);
    std::vector<int> l(100, 0);
    const auto a = TaskDataset::with_random_split("s", 1, f, l, 1, 0.2, 5);
    CHECK(a.test_rows().size() == 20);
    CHECK(a.train_rows().size() == 80);
    std::set<std::size_t> all(a.train_rows().begin(), a.train_rows().end());
    all.insert(a.test_rows().begin(), a.test_rows().end());
    CHECK(all.size() == 100);
    CHECK(a == TaskDataset::with_random_split("s", 1, f, l, 1, 0.2, 5));

    const auto tiny = TaskDataset::with_random_split("t", 1, {1.0, 2.0}, {0, 0}, 1, 0.01, 1);
    CHECK(tiny.test_rows().size() == 1);
    CHECK(tiny.train_rows().size() == 1);
    CHECK_THROWS_AS(TaskDataset::with_random_split("t", 1, f, l, 1, 1.5, 1), InvalidArgument);
}

TEST_CASE("separate splits") {
    const TaskDataset tr("a", 1, {1, 2, 3}, {0, 1, 0}, 2, {0, 1, 2}, {});
    const TaskDataset te("b", 1, {4, 5}, {1, 1}, 2, {}, {0, 1});
    const auto d = TaskDataset::from_separate_splits("ab", tr, te);
    CHECK(d.size() == 5);
    CHECK(d.train_rows().size() == 3);
    CHECK(d.test_rows().size() == 2);
    CHECK(d.row(3)[0] == 4.0);
    CHECK(d.label(4) == 1);
}

TEST_CASE("csv round trip") {
    const auto d = TaskDataset::with_random_split("rt", 2, {0.1, 1e-17, -3.5, 2.0 / 3.0, 7, 8}, {0, 2, 1}, 3, 0.2, 9);
    const auto path = scratch("rt.csv");
    write_dataset_csv(d, path);
    const auto back = read_dataset_csv(path, "rt", 0, 0.2, 9);
    CHECK(back == d);
}

TEST_CASE("csv reader rejects malformed files") {
    const auto path = scratch("bad.csv");
    {
        std::ofstream(path) << "feature_0,label\n1.0,x\n";
    }
    CHECK_THROWS_AS(read_dataset_csv(path, "bad"), FormatError);
    {
        std::ofstream(path) << "a,b\n1,0\n";
    }
    CHECK_THROWS_AS(read_dataset_csv(path, "bad"), FormatError);
    {
        std::ofstream(path) << "feature_0,label\n1,0,3\n";
    }
    CHECK_THROWS_AS(read_dataset_csv(path, "bad"), FormatError);
    CHECK_THROWS_AS(read_dataset_csv(scratch("missing.csv"), "bad"), FormatError);
}

TEST_CASE("real formatting round-trips") {
    for (double v : {0.0, 1.0, -2.5, 0.1, 1.0 / 3.0, 1e300, 5e-324}) {
        CHECK(csv::parse_real(csv::format_real(v), "v") == v);
    }
    CHECK(csv::format_real(0.5) == "0.5");
    CHECK_THROWS_AS(csv::parse_real("1.0x", "v"), FormatError);
    CHECK_THROWS_AS(csv::parse_int("", "v"), FormatError);
    CHECK(csv::split_line("a,,b").size() == 3);
}
