/**
 * Timesheet loading: turn the declarative markup embedded in the page head
 * into a schedule graph whose item selectors are resolved up front.
 *
 * The loader works against a minimal structural view of elements so the same
 * code runs on the browser DOM and on the parsed trees used in tests.
 */
export class MalformedTimesheet extends Error {
}
export class MissingTarget extends Error {
}
const CONTAINER_TAGS = new Set(["par", "seq", "excl"]);
const CLICK_RE = /^click\(([^()]+)\)$/;
const CLOCK_RE = /^(\d+)(ms|s)?$|^(\d+)\.(\d+)s?$/;
function localName(el) {
    const tag = el.tagName;
    const colon = tag.indexOf(":");
    return (colon >= 0 ? tag.slice(colon + 1) : tag).toLowerCase();
}
function parseClock(text) {
    const match = CLOCK_RE.exec(text.trim());
    if (!match) {
        throw new MalformedTimesheet(`invalid clock value '${text}'`);
    }
    if (match[1] !== undefined) {
        const value = parseInt(match[1], 10);
        return match[2] === "ms" ? value : value * 1000;
    }
    const frac = (match[4] + "000").slice(0, 3);
    return parseInt(match[3], 10) * 1000 + parseInt(frac, 10);
}
function parseBegin(raw) {
    if (raw === null) {
        return { type: "offset", ms: 0 };
    }
    const click = CLICK_RE.exec(raw.trim());
    if (click) {
        return { type: "click", target: click[1] };
    }
    return { type: "offset", ms: parseClock(raw) };
}
function parseDur(raw) {
    if (raw === null)
        return { type: "auto" };
    const text = raw.trim();
    if (text === "media")
        return { type: "media" };
    if (text === "indefinite")
        return { type: "indefinite" };
    return { type: "ms", ms: parseClock(text) };
}
function collectIds(el, into) {
    const id = el.getAttribute("id");
    if (id !== null)
        into.add(id);
    for (let i = 0; i < el.children.length; i++) {
        collectIds(el.children[i], into);
    }
}
function findTimesheets(el, found) {
    if (localName(el) === "timesheet")
        found.push(el);
    for (let i = 0; i < el.children.length; i++) {
        findTimesheets(el.children[i], found);
    }
}
let anonymousCounter = 0;
function buildNode(el, targets) {
    const name = localName(el);
    const begin = parseBegin(el.getAttribute("begin"));
    const dur = parseDur(el.getAttribute("dur"));
    const nodeId = el.getAttribute("id") ?? `ts-anon-${++anonymousCounter}`;
    if (name === "item") {
        const select = el.getAttribute("select");
        if (select === null || !select.startsWith("#") || select.length < 2) {
            throw new MalformedTimesheet(`item needs select="#id", got '${select}'`);
        }
        const target = select.slice(1);
        if (!targets.has(target)) {
            throw new MissingTarget(`selector '${select}' matches no element`);
        }
        if (el.children.length > 0) {
            throw new MalformedTimesheet("items cannot have children");
        }
        return { nodeId, kind: "item", target, begin, dur, children: [] };
    }
    if (!CONTAINER_TAGS.has(name)) {
        throw new MalformedTimesheet(`unknown timesheet element '${name}'`);
    }
    const children = [];
    for (let i = 0; i < el.children.length; i++) {
        children.push(buildNode(el.children[i], targets));
    }
    return { nodeId, kind: name, target: null, begin, dur, children };
}
/**
 * Build the schedule graph from a document tree containing exactly one
 * timesheet element with exactly one root container.
 */
export function loadTimesheet(documentRoot) {
    const sheets = [];
    findTimesheets(documentRoot, sheets);
    if (sheets.length !== 1) {
        throw new MalformedTimesheet(`expected exactly one timesheet, found ${sheets.length}`);
    }
    const targets = new Set();
    collectIds(documentRoot, targets);
    const roots = sheets[0].children;
    if (roots.length !== 1) {
        throw new MalformedTimesheet(`timesheet must hold one root container, found ${roots.length}`);
    }
    return { root: buildNode(roots[0], targets), targets };
}
