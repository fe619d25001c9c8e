#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "wams/osm.hpp"

#include <sstream>

using namespace wams;

namespace {

// fixture: one residential way between two nodes near (53.35, -2.88), zone 30
const char* kTwoNodeWay = R"(<?xml version="1.0"?>
<osm>
  <node id="1" lat="53.3500" lon="-2.8800"/>
  <node id="2" lat="53.3510" lon="-2.8800"/>
  <way id="10">
    <nd ref="1"/><nd ref="2"/>
    <tag k="highway" v="residential"/>
  </way>
</osm>)";

const char* kBuildingCw = R"(<?xml version="1.0"?>
<osm>
  <node id="1" lat="53.3500" lon="-2.8800"/>
  <node id="2" lat="53.3500" lon="-2.8797"/>
  <node id="3" lat="53.3502" lon="-2.8797"/>
  <node id="4" lat="53.3502" lon="-2.8800"/>
  <way id="20">
    <nd ref="1"/><nd ref="4"/><nd ref="3"/><nd ref="2"/><nd ref="1"/>
    <tag k="building" v="yes"/>
  </way>
</osm>)";

} // namespace

TEST_CASE("empty OSM document gives empty networks") {
    auto r = parse_osm_string("<osm/>");
    CHECK(r.roads.edges.empty());
    CHECK(r.paths.edges.empty());
    CHECK(r.buildings.empty());
    auto r2 = parse_osm_string("");
    CHECK(r2.roads.edges.empty());
}

TEST_CASE("residential way without lanes tag gets the class default") {
    auto r = parse_osm_string(kTwoNodeWay);
    REQUIRE(r.roads.edges.size() == 1);
    const RoadEdge& e = r.roads.edges.begin()->second;
    CHECK(e.lanes == default_lanes(RoadClass::Residential));
    CHECK(e.road_class == RoadClass::Residential);
    CHECK(e.sidewalk); // residential gets a sidewalk by default
    CHECK(e.length() == doctest::Approx(111.2).epsilon(0.01)); // ~0.001 deg latitude
    CHECK(r.utm_zone == 30);
    // sidewalk invariant: parallel path segments offset by lane geometry
    int sidewalks = 0;
    for (const auto& [id, pe] : r.paths.edges)
        if (pe.kind == PathKind::Sidewalk) ++sidewalks;
    CHECK(sidewalks == 2);
    double expect_off = e.half_width() + 1.0;
    const PathEdge& sw = r.paths.edges.begin()->second;
    CHECK(point_segment_distance(sw.shape.front(), e.shape.front(), e.shape.back()) ==
          doctest::Approx(expect_off).epsilon(0.01));
}

TEST_CASE("explicit lanes tag wins over the default") {
    std::string doc = kTwoNodeWay;
    doc.insert(doc.find("</way>"), "<tag k=\"lanes\" v=\"3\"/>");
    auto r = parse_osm_string(doc);
    REQUIRE(r.roads.edges.size() == 1);
    CHECK(r.roads.edges.begin()->second.lanes == 3);
}

TEST_CASE("closed building way is reoriented CCW") {
    auto r = parse_osm_string(kBuildingCw);
    REQUIRE(r.buildings.size() == 1);
    const BuildingFootprint& b = r.buildings[0];
    CHECK(b.ring.size() == 4);
    // shoelace oracle: signed area must come out positive after reorientation
    CHECK(signed_area(b.ring) > 0.0);
    CHECK(b.area() == doctest::Approx(22.2 * 20.0).epsilon(0.1));
    CHECK(b.building_class == BuildingClass::Other);
}

TEST_CASE("way referencing a missing node is rejected with a warning") {
    std::string doc = R"(<osm>
      <node id="1" lat="53.35" lon="-2.88"/>
      <way id="10"><nd ref="1"/><nd ref="99"/><tag k="highway" v="residential"/></way>
    </osm>)";
    auto r = parse_osm_string(doc);
    CHECK(r.roads.edges.empty());
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].find("way 10") != std::string::npos);
}

TEST_CASE("malformed XML reports a line number") {
    try {
        parse_osm_string("<osm>\n<node id=\"1\" </osm>");
        FAIL("expected OsmParseError");
    } catch (const OsmParseError& e) {
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
}

TEST_CASE("parse is deterministic: same bytes, identical networks") {
    auto a = parse_osm_string(kTwoNodeWay);
    auto b = parse_osm_string(kTwoNodeWay);
    REQUIRE(a.roads.edges.size() == b.roads.edges.size());
    for (const auto& [id, e] : a.roads.edges) {
        const RoadEdge& f = b.roads.edges.at(id);
        CHECK(e.from == f.from);
        CHECK(e.to == f.to);
        CHECK(e.shape.size() == f.shape.size());
        for (std::size_t i = 0; i < e.shape.size(); ++i) {
            CHECK(e.shape[i].x == f.shape[i].x);
            CHECK(e.shape[i].y == f.shape[i].y);
        }
    }
}

TEST_CASE("ways crossing at a shared node split into edges and form a junction") {
    const char* cross = R"(<osm>
      <node id="1" lat="53.3500" lon="-2.8820"/>
      <node id="2" lat="53.3500" lon="-2.8800"/>
      <node id="3" lat="53.3500" lon="-2.8780"/>
      <node id="4" lat="53.3490" lon="-2.8800"/>
      <node id="5" lat="53.3510" lon="-2.8800"/>
      <way id="10"><nd ref="1"/><nd ref="2"/><nd ref="3"/><tag k="highway" v="residential"/></way>
      <way id="11"><nd ref="4"/><nd ref="2"/><nd ref="5"/><tag k="highway" v="residential"/></way>
    </osm>)";
    auto r = parse_osm_string(cross);
    CHECK(r.roads.edges.size() == 4);
    REQUIRE(r.roads.junctions.size() == 1);
    CHECK(r.roads.junctions.begin()->second.node == 2);
    // path network around the cross is connected (crossings join sidewalks)
    r.paths.relabel_components();
    int comp0 = r.paths.component.begin()->second;
    for (const auto& [nid, c] : r.paths.component) CHECK(c == comp0);
}
