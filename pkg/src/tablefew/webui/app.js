"use strict";(()=>{var l=class extends Error{constructor(n,s){super(s);this.status=n}},c=class{constructor(e="",n=(s,r)=>fetch(s,r)){this.baseUrl=e;this.fetchFn=n}async request(e,n){let s=await this.fetchFn(this.baseUrl+e,n),r=null;try{r=await s.json()}catch{}if(!s.ok){let i=r&&typeof r=="object"&&"error"in r?String(r.error):`HTTP ${s.status}`;throw new l(s.status,i)}return r}listTasks(e,n,s=!0){let r=new URLSearchParams({offset:String(e),limit:String(n),only_unannotated:s?"true":"false"});return this.request(`/api/tasks?${r}`)}submitRating(e,n,s){return this.request("/api/annotations",{method:"POST",headers:{"Content-Type":"application/json"},body:JSON.stringify(s===void 0?{task_id:e,rating:n}:{task_id:e,rating:n,notes:s})})}progress(){return this.request("/api/progress")}};var f={0:0,1:1,2:2},v="u";function w(t,e){return e in f?(t.rate(f[e]),!0):e===v?(t.undo(),!0):!1}function y(t,e){e.addEventListener("keydown",n=>{let s=n.key;w(t,s)&&n.preventDefault?.()})}var d=class{constructor(e){this.api=e;this.current=null;this.history=[];this.progress=null;this.banner={kind:"none"};this.queue=[];this.done=!1;this.listeners=[];this.busy=!1}subscribe(e){this.listeners.push(e)}snapshot(){return{current:this.current,progress:this.progress,banner:this.banner,queueLength:this.queue.length,done:this.done,busy:this.busy}}emit(){let e=this.snapshot();for(let n of this.listeners)n(e)}async start(){try{this.progress=await this.api.progress(),await this.advance(),this.banner={kind:"none"}}catch(e){this.banner={kind:"error",message:b(e),retryable:!0}}this.emit()}async advance(){let e=await this.api.listTasks(0,1,!0);this.progress={total:e.total,annotated_count:e.annotated_count,by_rating:this.progress?.by_rating??{0:0,1:0,2:0}},e.tasks.length===0?(this.current=null,this.done=!0):(this.current=e.tasks[0],this.done=!1)}async rate(e){if(!this.current||this.busy)return;this.busy=!0;let n=this.current;try{await this.api.submitRating(n.task_id,e),this.history.push(n),this.progress=await this.api.progress(),await this.advance(),this.banner={kind:"none"},await this.flushQueue()}catch(s){s instanceof l?this.banner={kind:"validation",message:s.message}:(this.queue.push({taskId:n.task_id,rating:e}),this.banner={kind:"error",message:b(s),retryable:!0})}finally{this.busy=!1}this.emit()}async undo(){let e=this.history.pop();if(e){try{let s=(await this.api.listTasks(0,1e3,!1)).tasks.find(r=>r.task_id===e.task_id);this.current=s??e,this.done=!1,this.banner={kind:"none"}}catch(n){this.current=e,this.banner={kind:"error",message:b(n),retryable:!0}}this.emit()}}async flushQueue(){if(this.queue.length!==0){for(;this.queue.length>0;){let e=this.queue[0];try{await this.api.submitRating(e.taskId,e.rating),this.queue.shift()}catch(n){n instanceof l&&(this.queue.shift(),this.banner={kind:"validation",message:n.message});break}}this.progress=await this.api.progress().catch(()=>this.progress),this.emit()}}async retry(){await this.flushQueue(),!this.current&&!this.done?await this.start():this.emit()}};function b(t){return t instanceof Error?t.message:String(t)}var E=10;function T(t,e){let n=e.createDocumentFragment(),s=/\[[^\]]*\]/g,r=0;for(let i of t.matchAll(s)){let a=i.index??0;a>r&&n.append(e.createTextNode(t.slice(r,a)));let o=e.createElement("span");o.className="col-header",o.textContent=i[0],n.append(o),r=a+i[0].length}return r<t.length&&n.append(e.createTextNode(t.slice(r))),n}function _(t,e){let n=e.createElement("div");n.className="task-card",n.dataset.taskId=t.task_id;let s=e.createElement("div");s.className="task-head";let r=e.createElement("span");r.className="website",r.textContent=t.website;let i=e.createElement("span");i.className="target-header",i.textContent=`target: [${t.target_header}]`;let a=e.createElement("code");a.className="task-id",a.textContent=t.task_id,s.append(r,i,a),n.append(s);let o=e.createElement("div");o.className="examples";let p=t.examples.slice(0,E);for(let u of p){let m=e.createElement("div");m.className="example";let h=e.createElement("div");h.className="example-input",h.append(T(u.input,e));let g=e.createElement("div");g.className="example-output",g.textContent=u.output,m.append(h,g),o.append(m)}if(n.append(o),t.example_count>p.length){let u=e.createElement("div");u.className="more-note",u.textContent=`${t.example_count-p.length} more examples not shown`,n.append(u)}return n}function k(t){let e=t.createElement("details");e.className="help-panel";let n=t.createElement("summary");n.textContent="Rating guide (keys 0 / 1 / 2, u to undo)",e.append(n);let s=[["0 \u2014 not valid or useful",["input-output mapping looks nonsensical or arbitrary","not in English","relies on missing context or tests obscure trivia","shuffled output labels would be indistinguishable"]],["1 \u2014 flawed or trivial",["interesting but confusing or lacking context in its current form","guessable at better-than-random with options in hand","makes sense but is trivial (for example, output copies the input)"]],["2 \u2014 well-posed and useful",["enough context that an expert could usually answer correctly","demonstrates a skill with real-world value","resembles what a standard benchmark would test"]]];for(let[r,i]of s){let a=t.createElement("p");a.className="help-class",a.textContent=r;let o=t.createElement("ul");for(let p of i){let u=t.createElement("li");u.textContent=p,o.append(u)}e.append(a,o)}return e}function x(t,e){let n=e.getElementById("banner");if(n.innerHTML="",n.className=`banner banner-${t.banner.kind}`,t.banner.kind==="error"){n.append(e.createTextNode(`server unreachable: ${t.banner.message} `));let a=e.createElement("button");a.id="retry",a.textContent="retry",n.append(a)}else t.banner.kind==="validation"&&(n.textContent=`rejected: ${t.banner.message}`);let s=e.getElementById("queue");s.textContent=t.queueLength>0?`${t.queueLength} submissions queued for retry`:"";let r=e.getElementById("progress");if(t.progress){let a=t.progress;r.textContent=`${a.annotated_count} / ${a.total} annotated (0: ${a.by_rating[0]}, 1: ${a.by_rating[1]}, 2: ${a.by_rating[2]})`}else r.textContent="";let i=e.getElementById("stage");if(i.innerHTML="",t.current)i.append(_(t.current,e));else if(t.done){let a=e.createElement("p");a.className="done-note",a.textContent="All tasks annotated.",i.append(a)}}function S(t,e=""){let n=new c(e),s=new d(n);return t.getElementById("help").append(k(t)),s.subscribe(r=>x(r,t)),y(s,t),t.getElementById("banner").addEventListener("click",r=>{r.target.id==="retry"&&s.retry()}),t.defaultView?.addEventListener("online",()=>void s.flushQueue()),s.start(),s}typeof document<"u"&&document.getElementById("stage")&&(window.__tablefewSession=S(document));})();
