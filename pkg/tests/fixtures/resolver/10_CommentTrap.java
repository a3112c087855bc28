package com.example;

// depends: no

public class CommentTrap {
    /*
     * Historical approach:
     *   JSONObject holder = new JSONObject(bean);
     *   return holder.toJSONString();
     */
    public String describe(Object bean) {
        // previously: new org.json.JSONObject(bean).toJSONString()
        return String.valueOf(bean);
    }
}
