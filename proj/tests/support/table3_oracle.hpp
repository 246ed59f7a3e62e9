#pragma once

#include <vector>

// Independent transcription of the candidate-band table: for each FDD band,
// the TDD bands able to reuse its UL and DL spectrum ({} means none).
struct Table3Row {
  int band;
  std::vector<int> ul;
  std::vector<int> dl;
};

inline const std::vector<Table3Row>& table3_oracle() {
  static const std::vector<Table3Row> rows{
      {1, {36}, {}},       {2, {33, 35}, {36}}, {3, {}, {35, 39}}, {4, {}, {}},         {5, {}, {}},
      {6, {}, {}},         {7, {41}, {41}},     {8, {}, {}},       {9, {}, {35, 39}},   {10, {}, {}},
      {11, {}, {32}},      {12, {44}, {44}},    {13, {44}, {44}},  {14, {44}, {44}},    {17, {44}, {44}},
      {18, {}, {}},        {19, {}, {}},        {20, {}, {44}},    {21, {32}, {}},      {22, {42}, {42}},
      {23, {34}, {}},      {24, {}, {}},        {25, {39}, {36}},  {26, {}, {}},        {27, {}, {}},
      {28, {44}, {44}},    {29, {}, {44}},      {30, {40}, {40}},  {31, {}, {}},        {32, {}, {}},
  };
  return rows;
}
