#ifndef WCD_WCD_HPP
#define WCD_WCD_HPP

#include "wcd/curves.hpp"
#include "wcd/disclosure.hpp"
#include "wcd/errors.hpp"
#include "wcd/hierarchy.hpp"
#include "wcd/knowledge.hpp"
#include "wcd/oracle.hpp"
#include "wcd/rational.hpp"
#include "wcd/search.hpp"
#include "wcd/table.hpp"

#endif  // WCD_WCD_HPP
