"""
Nested modules and a responsive grid
====================================

A mirror element copies the state classes of its nearest breakpoints
ancestor, so a selector only needs to look one module up. The grid plugin
builds on the same machinery and generates its CSS from column classes.
"""

from elq import run_scenario

nested = """
<div id="outer" class="foo" elq elq-breakpoints elq-breakpoints-widths="300 500" style="width: 1200px">
  <div id="inner" class="foo" elq elq-breakpoints elq-breakpoints-widths="300 500">
    <p id="inner-p" elq elq-mirror>inner</p>
  </div>
  <p id="outer-p" elq elq-mirror>outer</p>
</div>
"""
css = ".foo { width: 50%; } .foo p.elq-min-width-500px { color: white; }"

##############################################################################
# With the outer module at 1200px the inner one is 600px; both paragraphs
# are white. At 800px the inner module drops to 400px and only the outer
# paragraph stays white.

for width in (1200, 800):
    report = run_scenario(nested, css, {"steps": [
        {"op": "set_style", "target": "#outer", "property": "width", "value": f"{width}px"},
    ]})
    e = report.elements
    print(f"outer {width}px: inner is {e['#inner']['box']['width']}px, "
          f"outer p {e['#outer-p']['style'].get('color', '-')}, inner p {e['#inner-p']['style'].get('color', '-')}")

##############################################################################
# A three column grid: one column below 500px, three up to 700px, two above
# with the last column hidden.

grid = """
<div class="container" elq>
  <div class="row" id="row">
    <div id="a" class="col-500-4 col-700-6"></div>
    <div id="b" class="col-500-4 col-700-6"></div>
    <div id="c" class="col-500-4 hidden-700-up"></div>
  </div>
</div>
"""

for width in (400, 600, 800):
    report = run_scenario(grid, "", {"viewport": [width, 600]})
    cols = []
    for key in ("#a", "#b", "#c"):
        box = report.elements[key]["box"]
        cols.append("hidden" if box is None else f"{box['width'] / width * 100:.4g}%")
    print(f"row {width}px: {', '.join(cols)}")

print()
print(report.generated_css)
