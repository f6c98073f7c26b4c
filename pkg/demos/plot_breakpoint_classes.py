"""
Breakpoint state classes
========================

An element with two width breakpoints gets one class per breakpoint. Each
class says on which side of the breakpoint the element currently is, so plain
CSS can select on it.
"""

from elq import parse_markup, parse_stylesheet, cascade, Page, Elq, install_default_plugins

markup = """
<div>
  <div id="foo" class="foo" elq elq-breakpoints elq-breakpoints-widths="300 500">
    <p>When in doubt, mumble.</p>
  </div>
</div>
"""

css = """
.foo { width: 40%; }
.foo.elq-max-width-300px { background-color: blue; }
.foo.elq-min-width-300px.elq-max-width-500px { background-color: green; }
.foo.elq-min-width-500px p { color: white; }
"""

##############################################################################
# Build a page, register the bundled plugins and activate every ``[elq]``
# element, exactly like the browser bootstrap does.

doc = parse_markup(markup)
page = Page(doc, parse_stylesheet(css), viewport=(1000, 768))
elq = Elq(page)
install_default_plugins(elq)
elq.activate([el.id for el in doc.iter() if "elq" in el.attributes])
page.settle()

foo = doc.by_attribute_id("foo").id
para = doc.get(foo).children[0]


def show(label):
    style = cascade(doc, page.layout.stylesheet, foo)
    bg = style.get("background-color")
    color = cascade(doc, page.layout.stylesheet, para).get("color")
    print(f"{label:>14}: width={page.layout.box(foo).width:5.0f}  "
          f"classes={doc.get(foo).classes[1:]}  background={bg and bg.value}  p={color and color.value}")


show("viewport 1000")

##############################################################################
# Shrink the viewport. Classes are applied one layout behind: right after the
# change nothing has moved yet, after the event loop settles they are updated.

page.layout.set_viewport(500)
show("just resized")
page.settle()
show("viewport 500")

page.layout.set_viewport(1300)
page.settle()
show("viewport 1300")

##############################################################################
# A style that feeds back into the size it depends on would oscillate
# forever. The engine spots the revisited state set and keeps the last one.

doc = parse_markup('<div style="width: 250px"><div id="t" class="foo" elq elq-breakpoints '
                   'elq-breakpoints-widths="300"></div></div>')
page = Page(doc, parse_stylesheet(".foo.elq-max-width-300px { width: 400px; }"))
elq = Elq(page)
install_default_plugins(elq)
elq.activate(doc.by_attribute_id("t").id)
page.settle()
print("cycles detected:", elq.cycles_detected, "->", elq.warnings[0]["message"])
