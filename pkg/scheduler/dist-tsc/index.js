/** Browser bundle entry: boot once the page is ready. */
import { boot } from "./dom.js";
export { Scheduler, ClockRegression } from "./engine.js";
export { loadTimesheet, MalformedTimesheet, MissingTarget } from "./timesheet.js";
export { VirtualClock, SystemClock } from "./clock.js";
if (typeof window !== "undefined" && typeof window.document !== "undefined") {
    const start = () => boot(window.document);
    if (window.document.readyState === "loading") {
        window.document.addEventListener("DOMContentLoaded", start);
    }
    else {
        start();
    }
}
