#pragma once

#include "defect_reasoner/geometry.hpp"
#include "defect_reasoner/image.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace defect_reasoner {

struct GroundTruthDefect {
    Polygon region;
    int label = 0; // index into DefectDataset::categories
};

struct PredictedDefect {
    Polygon region;
    int label = 0;
    std::optional<double> confidence;
};

// Parsed annotation/prediction file, before images are attached.
struct AnnotationRecord {
    Polygon polygon;
    int label = 0;
    std::optional<double> confidence;
};

struct ImageAnnotations {
    std::string id;
    std::string file;
    std::vector<AnnotationRecord> defects;
};

struct AnnotationFile {
    std::vector<std::string> categories;
    std::vector<ImageAnnotations> images;
};

struct DatasetEntry {
    std::string id;
    RasterImage image;
    std::vector<GroundTruthDefect> truths;
    std::vector<PredictedDefect> predictions;
};

struct DefectDataset {
    std::vector<std::string> categories;
    std::vector<DatasetEntry> entries;

    std::size_t total_true_defects() const;
};

// File layout:
//   {"categories": ["crack", ...],
//    "images": [{"id": "...", "file": "...",
//                "defects": [{"polygon": [[x,y],...], "label": "crack",
//                             "confidence": 0.97}]}]}
// Ground-truth files must not carry "confidence"; prediction files may.
// Polygons come out normalised (counter-clockwise, consecutive duplicates
// merged).
AnnotationFile parse_annotations(const std::filesystem::path& path);
AnnotationFile parse_predictions(const std::filesystem::path& path);

AnnotationFile parse_annotations_text(const std::string& text, bool allow_confidence);

// Inverse of the parsers; parsing the output reproduces the input structure.
std::string serialize_annotations(const AnnotationFile& file, bool with_confidence);

struct NamedImage {
    std::string id;
    RasterImage image;
};

// Joins images, ground truth and predictions by image id, clamps polygons
// to image bounds and enforces pairwise-disjoint ground-truth regions.
// Truth ids and image ids must match exactly; every prediction id must be
// a known truth id (an image with no prediction entry simply has none).
DefectDataset assemble_dataset(std::vector<NamedImage> images,
                               const AnnotationFile& truths,
                               const AnnotationFile& predictions);

} // namespace defect_reasoner
